#include "qsep/neldermead.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsep {

namespace {

double diameter(const std::vector<std::vector<double>>& simplex) {
    double d = 0;
    for (std::size_t i = 1; i < simplex.size(); ++i)
        for (std::size_t k = 0; k < simplex[0].size(); ++k)
            d = std::max(d, std::abs(simplex[i][k] - simplex[0][k]));
    return d;
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<std::vector<double>> simplex,
                             const NelderMeadOptions& options) {
    const std::size_t n = simplex.empty() ? 0 : simplex[0].size();
    if (simplex.size() != n + 1) throw std::invalid_argument("simplex needs n+1 vertices");

    int evals = 0;
    std::vector<double> values(simplex.size());
    for (std::size_t i = 0; i < simplex.size(); ++i) {
        values[i] = f(simplex[i]);
        ++evals;
    }

    auto order = [&] {
        std::vector<std::size_t> idx(simplex.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> v2;
        for (std::size_t i : idx) {
            s2.push_back(simplex[i]);
            v2.push_back(values[i]);
        }
        simplex = std::move(s2);
        values = std::move(v2);
    };

    order();
    while (evals < options.max_evals && diameter(simplex) > options.diameter_tol) {
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < simplex.size() - 1; ++i)
            for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k];
        for (double& c : centroid) c /= double(n);

        const std::vector<double>& worst = simplex.back();
        auto blend = [&](double coeff) {
            std::vector<double> x(n);
            for (std::size_t k = 0; k < n; ++k) x[k] = centroid[k] + coeff * (centroid[k] - worst[k]);
            return x;
        };

        std::vector<double> reflected = blend(options.reflection);
        double fr = f(reflected);
        ++evals;

        if (fr < values.front()) {
            std::vector<double> expanded = blend(options.reflection * options.expansion);
            double fe = f(expanded);
            ++evals;
            if (fe < fr) {
                simplex.back() = expanded;
                values.back() = fe;
            } else {
                simplex.back() = reflected;
                values.back() = fr;
            }
        } else if (fr < values[values.size() - 2]) {
            simplex.back() = reflected;
            values.back() = fr;
        } else {
            bool outside = fr < values.back();
            std::vector<double> contracted =
                blend(outside ? options.reflection * options.contraction : -options.contraction);
            double fc = f(contracted);
            ++evals;
            if (fc < std::min(fr, values.back())) {
                simplex.back() = contracted;
                values.back() = fc;
            } else {
                for (std::size_t i = 1; i < simplex.size(); ++i) {
                    for (std::size_t k = 0; k < n; ++k)
                        simplex[i][k] =
                            simplex[0][k] + options.shrink * (simplex[i][k] - simplex[0][k]);
                    values[i] = f(simplex[i]);
                    ++evals;
                }
            }
        }
        order();
    }

    NelderMeadResult result;
    result.x = simplex.front();
    result.fx = values.front();
    result.evaluations = evals;
    return result;
}

}  // namespace qsep

#pragma once

#include <functional>
#include <vector>

namespace qsep {

struct NelderMeadOptions {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    int max_evals = 2000;
    double diameter_tol = 1e-7;
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0;
    int evaluations = 0;
};

/// Derivative-free simplex minimization. Deterministic given the starting
/// simplex; stops when the simplex diameter (max-norm) drops below
/// diameter_tol or the evaluation budget is spent.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<std::vector<double>> simplex,
                             const NelderMeadOptions& options = {});

}  // namespace qsep

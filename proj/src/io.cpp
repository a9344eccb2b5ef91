#include "qsep/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qsep/eig.hpp"
#include "qsep/rng.hpp"

namespace qsep {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

SubsystemShape parse_shape(const std::string& text) {
    std::vector<int> dims;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, 'x')) {
        try {
            dims.push_back(std::stoi(piece));
        } catch (const std::exception&) {
            throw usage_error("malformed shape: " + text);
        }
    }
    if (dims.empty()) throw usage_error("malformed shape: " + text);
    try {
        return SubsystemShape(dims);
    } catch (const invariant_error& e) {
        throw usage_error(std::string("malformed shape: ") + e.what());
    }
}

std::map<std::string, std::string> parse_params(const std::string& text) {
    std::map<std::string, std::string> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        auto eq = piece.find('=');
        if (eq == std::string::npos || eq == 0)
            throw usage_error("malformed parameter (expected k=v): " + piece);
        out[piece.substr(0, eq)] = piece.substr(eq + 1);
    }
    return out;
}

std::string state_to_json(const StateFile& state) {
    json j;
    j["shape"] = state.shape.local_dims();
    json entries = json::array();
    for (const cplx& v : state.matrix.entries()) entries.push_back({v.real(), v.imag()});
    j["entries"] = std::move(entries);
    j["metadata"] = state.metadata;
    return j.dump(2) + "\n";
}

StateFile state_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw usage_error(std::string("malformed state file: ") + e.what());
    }
    StateFile out;
    try {
        std::vector<int> dims = j.at("shape").get<std::vector<int>>();
        out.shape = SubsystemShape(dims);
        const json& entries = j.at("entries");
        std::size_t expected = std::size_t(out.shape.dim()) * std::size_t(out.shape.dim());
        if (entries.size() != expected)
            throw invariant_error("entry count does not match shape");
        std::vector<cplx> data;
        data.reserve(expected);
        for (const json& e : entries) {
            if (!e.is_array() || e.size() != 2)
                throw invariant_error("entries must be [re, im] pairs");
            data.emplace_back(e[0].get<double>(), e[1].get<double>());
        }
        out.matrix = ComplexMatrix(out.shape.dim(), out.shape.dim(), std::move(data));
        if (j.contains("metadata"))
            out.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
    } catch (const json::exception& e) {
        throw usage_error(std::string("malformed state file: ") + e.what());
    }
    out.to_density();  // validate the density-matrix invariants up front
    return out;
}

void save_state(const std::string& path, const StateFile& state) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw usage_error("cannot open for writing: " + path);
    f << state_to_json(state);
}

StateFile load_state(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw usage_error("cannot open state file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return state_from_json(ss.str());
}

namespace {

double param_double(const std::map<std::string, std::string>& params, const std::string& key,
                    std::optional<double> fallback = std::nullopt) {
    auto it = params.find(key);
    if (it == params.end()) {
        if (fallback) return *fallback;
        throw usage_error("missing parameter: " + key);
    }
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw usage_error("malformed value for parameter " + key + ": " + it->second);
    }
}

int param_int(const std::map<std::string, std::string>& params, const std::string& key,
              std::optional<int> fallback = std::nullopt) {
    auto it = params.find(key);
    if (it == params.end()) {
        if (fallback) return *fallback;
        throw usage_error("missing parameter: " + key);
    }
    try {
        return std::stoi(it->second);
    } catch (const std::exception&) {
        throw usage_error("malformed value for parameter " + key + ": " + it->second);
    }
}

}  // namespace

StateFile gen_state(const std::string& family, const std::map<std::string, std::string>& params,
                    std::uint64_t seed) {
    StateFile out;
    auto set = [&](const DensityMatrix& rho) {
        out.shape = rho.shape();
        out.matrix = rho.matrix();
    };

    auto pure = [](const PureState& psi) { return DensityMatrix(psi.projector(), psi.shape()); };

    if (family == "ghz") {
        set(pure(ghz(param_int(params, "n", 3))));
    } else if (family == "w") {
        set(pure(w_state(param_int(params, "n", 3))));
    } else if (family == "bell") {
        set(pure(bell_phi_plus()));
    } else if (family == "rho-alpha") {
        set(rho_alpha(param_double(params, "alpha")));
    } else if (family == "rho-abc") {
        set(rho_abc(param_double(params, "a"), param_double(params, "b"),
                    param_double(params, "c")));
    } else if (family == "werner") {
        set(werner(param_double(params, "p")));
    } else if (family == "white-noise") {
        int d = param_int(params, "d", 2);
        std::vector<double> s(std::size_t(d), 1.0 / std::sqrt(double(d)));
        set(white_noise_mix(schmidt_pure(SchmidtVector(s), d), param_double(params, "p")));
    } else if (family == "random-pure") {
        auto it = params.find("shape");
        SubsystemShape shape = it == params.end() ? SubsystemShape({2, 2}) : parse_shape(it->second);
        set(pure(random_pure(shape, seed)));
    } else if (family == "random-density") {
        auto it = params.find("shape");
        SubsystemShape shape = it == params.end() ? SubsystemShape({2, 2}) : parse_shape(it->second);
        int rank = param_int(params, "rank", shape.dim());
        DensityMatrix rho = random_density(shape.dim(), rank, seed);
        out.shape = shape;
        out.matrix = rho.matrix();
        DensityMatrix(out.matrix, out.shape);  // revalidate under the multipartite shape
    } else if (family == "random-separable") {
        auto it = params.find("shape");
        SubsystemShape shape = it == params.end() ? SubsystemShape({2, 2}) : parse_shape(it->second);
        set(random_separable(shape, param_int(params, "terms", 8), seed));
    } else {
        throw usage_error("unknown family: " + family);
    }

    out.metadata["family"] = family;
    for (const auto& [k, v] : params) out.metadata[k] = v;
    out.metadata["seed"] = std::to_string(seed);
    return out;
}

const std::vector<std::string>& criterion_catalog() {
    static const std::vector<std::string> names = {
        "cauchy2",     "cauchy4",     "cauchy4-mirror", "cauchy6",      "step5",
        "rank-one",    "hz-correlated", "hz-product",   "hz-bipartition", "hillery-geom",
        "hillery-arith", "shchukin-vogel", "guehne1",    "guehne2",      "guehne3",
        "seefinck-sep", "guehne-abc",  "woelk-abc",     "bisep-sum",    "gme",
        "perm-m2",     "det-ext"};
    return names;
}

namespace {

ComplexMatrix lower_op(int d) {  // |0><1| pattern: truncated annihilation operator
    return annihilation_op(d);
}

ComplexMatrix raise_from_zero(int d) {  // |1><0|
    ComplexMatrix m(d, d);
    m(1, 0) = 1;
    return m;
}

ComplexMatrix project_zero(int d) {  // |0><0|
    ComplexMatrix m(d, d);
    m(0, 0) = 1;
    return m;
}

/// Lazily computed operator context shared by the auto battery.
struct AutoContext {
    const DensityMatrix& rho;
    double tol;
    int restarts;
    std::uint64_t seed;

    bool bipartite = false;
    bool two_qubit = false;
    bool three_qubit = false;

    std::optional<WitnessCandidate> tq_witness;
    bool tq_witness_tried = false;

    std::optional<std::pair<BasisPoint, double>> optimum;

    explicit AutoContext(const DensityMatrix& r, double t, int rs, std::uint64_t sd)
        : rho(r), tol(t), restarts(rs), seed(sd) {
        bipartite = rho.shape().parties() == 2;
        two_qubit = bipartite && rho.shape().local_dim(0) == 2 && rho.shape().local_dim(1) == 2;
        three_qubit = rho.shape().parties() == 3 && rho.dim() == 8;
    }

    const std::optional<WitnessCandidate>& witness() {
        if (!tq_witness_tried) {
            tq_witness_tried = true;
            if (two_qubit) {
                try {
                    tq_witness = two_qubit_witness(rho);
                } catch (const witness_error&) {
                }
            }
        }
        return tq_witness;
    }

    const std::pair<BasisPoint, double>& optimized() {
        if (!optimum) optimum = optimize_E(rho, restarts, seed);
        return *optimum;
    }

    LocalOperatorSet default_pair_ops(int parties) const {
        LocalOperatorSet ops;
        for (int k = 0; k < parties; ++k) {
            int d = rho.shape().local_dim(k);
            ops.pairs.push_back({raise_from_zero(d), project_zero(d)});
        }
        return ops;
    }

    /// Rank-one pair ops from the optimized basis: P = |x><x|, Q = |x><y| with
    /// x the second vector and y the first, so the bound specializes to E.
    LocalOperatorSet optimized_pair_ops() {
        MeasurementBasis basis = optimized().first.to_basis();
        LocalOperatorSet ops;
        for (int k = 0; k < 3; ++k) {
            const auto& y = basis.vectors[std::size_t(k)][0];
            const auto& x = basis.vectors[std::size_t(k)][1];
            ComplexMatrix p(2, 2), q(2, 2);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    p(i, j) = x[std::size_t(i)] * std::conj(x[std::size_t(j)]);
                    q(i, j) = x[std::size_t(i)] * std::conj(y[std::size_t(j)]);
                }
            ops.pairs.push_back({std::move(p), std::move(q)});
        }
        return ops;
    }
};

struct VectorQuad {
    PureState a, alpha, b, beta;
    std::string provenance;
};

VectorQuad auto_vectors(AutoContext& ctx) {
    SubsystemShape la({ctx.rho.shape().local_dim(0)});
    SubsystemShape lb({ctx.rho.shape().local_dim(1)});
    if (ctx.two_qubit && ctx.witness()) {
        // recover the optimal vectors from the witness operators:
        // A1 = |a1*><alpha|, B1 = |b1><beta|, A2 = |alpha><a2*|, B2 = |beta><b2|
        const LocalOperatorSet& ops = ctx.witness()->operators;
        auto column_state = [](const ComplexMatrix& m, SubsystemShape shape) {
            // dominant left vector of a rank-one matrix |u><v|, up to phase
            int d = m.rows();
            std::vector<cplx> best(std::size_t(d), cplx(0));
            double best_norm = -1;
            for (int j = 0; j < d; ++j) {
                std::vector<cplx> col(std::size_t(d), cplx(0));
                double nrm = 0;
                for (int i = 0; i < d; ++i) {
                    col[std::size_t(i)] = m(i, j);
                    nrm += std::norm(m(i, j));
                }
                if (nrm > best_norm) {
                    best_norm = nrm;
                    best = col;
                }
            }
            double nrm = 0;
            for (const cplx& v : best) nrm += std::norm(v);
            nrm = std::sqrt(nrm);
            for (cplx& v : best) v /= nrm;
            return PureState(best, shape);
        };
        // the bound with a = a1*, alpha = a2*, b = b1, beta = b2 is the square
        // root of the witness cauchy2 inequality; phases cancel throughout
        PureState a = column_state(ops.pairs[0].p, la);                // |a1*>
        PureState alpha = column_state(dagger(ops.pairs[0].q), la);    // |a2*>
        PureState b = column_state(ops.pairs[1].p, lb);                // |b1>
        PureState beta = column_state(dagger(ops.pairs[1].q), lb);     // |b2>
        return {a, alpha, b, beta, "two-qubit-witness"};
    }
    return {basis_state(la, 0), basis_state(la, la.dim() - 1), basis_state(lb, 0),
            basis_state(lb, lb.dim() - 1), "computational"};
}

CriterionOutcome run_criterion(const std::string& name, AutoContext& ctx, OpsSource source,
                               const std::optional<LocalOperatorSet>& file_ops) {
    CriterionOutcome out;
    out.name = name;
    const DensityMatrix& rho = ctx.rho;
    const double tol = ctx.tol;
    const SubsystemShape& shape = rho.shape();
    const int n = shape.parties();

    auto pair_ops_for = [&](int parties, bool prefer_optimized) -> std::pair<LocalOperatorSet, std::string> {
        if (source == OpsSource::File) {
            if (!file_ops) throw usage_error("no operator file supplied");
            return {*file_ops, "file"};
        }
        if (parties == 2 && ctx.two_qubit && ctx.witness())
            return {ctx.witness()->operators, "two-qubit-witness"};
        if (parties == 3 && prefer_optimized && ctx.three_qubit) {
            LocalOperatorSet opt = ctx.optimized_pair_ops();
            LocalOperatorSet def = ctx.default_pair_ops(parties);
            // keep whichever detects more strongly
            EvaluationResult a = evaluate_spec(builtin_spec(name), opt, rho, tol);
            EvaluationResult b = evaluate_spec(builtin_spec(name), def, rho, tol);
            if (a.margin >= b.margin) return {opt, "optimize-E basis"};
            return {def, "default |1><0|,|0><0|"};
        }
        return {ctx.default_pair_ops(parties), "default |1><0|,|0><0|"};
    };
    auto single_ops = [&]() -> std::pair<std::vector<ComplexMatrix>, std::string> {
        if (source == OpsSource::File) {
            if (!file_ops) throw usage_error("no operator file supplied");
            std::vector<ComplexMatrix> ops;
            for (const OperatorPair& p : file_ops->pairs) ops.push_back(p.p);
            return {ops, "file (P slots)"};
        }
        std::vector<ComplexMatrix> ops;
        for (int k = 0; k < n; ++k) ops.push_back(lower_op(shape.local_dim(k)));
        return {ops, "annihilation per party"};
    };

    try {
        if (name == "cauchy2") {
            if (n != 2) throw invariant_error("needs a bipartite state");
            auto [ops, prov] = pair_ops_for(2, false);
            out.result = evaluate_spec(builtin_spec(name), ops, rho, tol);
            out.provenance = prov;
        } else if (name == "cauchy4" || name == "cauchy4-mirror" || name == "cauchy6" ||
                   name == "step5") {
            if (n != 3) throw invariant_error("needs three parties");
            auto [ops, prov] = pair_ops_for(3, ctx.three_qubit);
            out.result = evaluate_spec(builtin_spec(name), ops, rho, tol);
            out.provenance = prov;
        } else if (name == "rank-one") {
            if (n != 2) throw invariant_error("needs a bipartite state");
            if (source == OpsSource::File) throw invariant_error("rank-one uses auto vectors only");
            VectorQuad v = auto_vectors(ctx);
            out.result = evaluate_rank_one(rho, v.a, v.alpha, v.b, v.beta, tol);
            out.provenance = v.provenance;
        } else if (name == "perm-m2") {
            if (n != 2) throw invariant_error("needs a bipartite state");
            if (source == OpsSource::File) throw invariant_error("perm-m2 uses auto vectors only");
            VectorQuad v = auto_vectors(ctx);
            auto [lhs, rhs] = permutation_m2(rho, v.a, v.alpha, v.b, v.beta);
            out.result = make_result(lhs, rhs, tol);
            out.provenance = v.provenance;
        } else if (name == "det-ext") {
            if (n != 2 || shape.local_dim(0) != shape.local_dim(1))
                throw invariant_error("needs a D x D bipartite state");
            if (source == OpsSource::File) throw invariant_error("det-ext uses auto bases only");
            std::vector<std::vector<cplx>> basis_a, basis_b;
            std::string prov = "computational bases";
            if (ctx.two_qubit && ctx.witness()) {
                PTDiagnostics diag = ppt_diagnostics(rho, {0});
                SchmidtDecomposition sd = schmidt_decompose(diag.negative_eigenvectors.front());
                for (auto& v : sd.basis_a) {
                    for (cplx& c : v) c = std::conj(c);
                    basis_a.push_back(v);
                }
                basis_b = sd.basis_b;
                prov = "conjugated Schmidt basis of the negative eigenvector";
            } else {
                int d = shape.local_dim(0);
                for (int i = 0; i < d; ++i) {
                    std::vector<cplx> e(std::size_t(d), cplx(0));
                    e[std::size_t(i)] = 1;
                    basis_a.push_back(e);
                    basis_b.push_back(e);
                }
            }
            double det = determinant_extension(rho, basis_a, basis_b);
            out.result = make_result(std::max(-det, 0.0), std::max(det, 0.0), tol);
            out.provenance = prov;
        } else if (name == "hz-correlated" || name == "hz-product") {
            if (n != 2) throw invariant_error("needs a bipartite state");
            ComplexMatrix A = lower_op(shape.local_dim(0));
            ComplexMatrix B = lower_op(shape.local_dim(1));
            std::string prov = "annihilation per side";
            if (source == OpsSource::File) {
                if (!file_ops || file_ops->parties() != 2)
                    throw usage_error("operator file must carry two pairs");
                A = file_ops->pairs[0].p;
                B = file_ops->pairs[1].p;
                prov = "file (P slots)";
            }
            out.result = hillery_zubairy(
                rho, A, B, name == "hz-correlated" ? HzMode::Correlated : HzMode::Product, tol);
            out.provenance = prov;
        } else if (name == "hz-bipartition") {
            if (n < 2) throw invariant_error("needs at least two parties");
            auto [ops, prov] = single_ops();
            EvaluationResult best;
            int best_split = 1;
            for (int j = 1; j < n; ++j) {
                EvaluationResult r = hz_bipartition(rho, ops, j, tol);
                if (j == 1 || r.margin > best.margin) {
                    best = r;
                    best_split = j;
                }
            }
            out.result = best;
            out.provenance = prov + ", best split j=" + std::to_string(best_split);
        } else if (name == "hillery-geom" || name == "hillery-arith") {
            auto [ops, prov] = single_ops();
            out.result = hillery_multi(rho, ops,
                                       name == "hillery-geom" ? HilleryVariant::Geometric
                                                              : HilleryVariant::Arithmetic,
                                       tol);
            out.provenance = prov;
        } else if (name == "shchukin-vogel") {
            if (n != 2) throw invariant_error("needs a two-mode state");
            FockPowers powers;
            powers.q = 1;  // A2 = a
            powers.s = 1;  // B1 = b^dagger
            out.result = shchukin_vogel(rho, powers, tol);
            out.provenance = "powers (0,0,0,1,0,1,0,0)";
        } else if (name == "guehne1" || name == "guehne2" || name == "guehne3" ||
                   name == "seefinck-sep" || name == "guehne-abc" || name == "woelk-abc") {
            if (rho.dim() != 8 || n != 3) throw invariant_error("needs a three-qubit state");
            auto [offdiag, terms] = entry_pattern(name);
            out.result = entry_criterion(rho, offdiag.first, offdiag.second, terms, tol);
            out.provenance = "matrix entries";
        } else if (name == "bisep-sum") {
            if (rho.dim() != 8 || n != 3) throw invariant_error("needs a three-qubit state");
            out.result = biseparable_sum(rho, tol);
            out.provenance = "matrix entries";
        } else if (name == "gme") {
            if (n < 2) throw invariant_error("needs at least two parties");
            std::vector<ComplexMatrix> X, Y;
            std::string prov = "X=|0><u|, Y=|u><d-1| with u uniform";
            if (source == OpsSource::File) {
                if (!file_ops || file_ops->parties() != n)
                    throw usage_error("operator file must carry one pair per party");
                for (const OperatorPair& p : file_ops->pairs) {
                    X.push_back(p.p);
                    Y.push_back(p.q);
                }
                prov = "file";
            } else {
                for (int k = 0; k < n; ++k) {
                    int d = shape.local_dim(k);
                    std::vector<cplx> u(std::size_t(d), cplx(1.0 / std::sqrt(double(d))));
                    ComplexMatrix x(d, d), y(d, d);
                    for (int j = 0; j < d; ++j) {
                        x(0, j) = std::conj(u[std::size_t(j)]);
                        y(j, d - 1) = u[std::size_t(j)];
                    }
                    X.push_back(std::move(x));
                    Y.push_back(std::move(y));
                }
            }
            std::vector<std::vector<int>> splits;
            for (int mask = 1; mask < (1 << (n - 1)); ++mask) {
                std::vector<int> side;
                for (int k = 0; k < n; ++k)
                    if (mask & (1 << k)) side.push_back(k);
                splits.push_back(side);
            }
            out.result = gme_criterion(rho, X, Y, splits, tol);
            out.provenance = prov + ", all bipartitions";
        } else {
            throw usage_error("unknown criterion: " + name);
        }
        out.applicable = true;
    } catch (const usage_error&) {
        throw;
    } catch (const error& e) {
        out.applicable = false;
        out.error = e.what();
    }
    return out;
}

}  // namespace

BatteryReport analyze(const StateFile& state, const std::vector<std::string>& criteria,
                      OpsSource ops_source, const std::optional<LocalOperatorSet>& file_ops,
                      double tol, int restarts, std::uint64_t seed) {
    DensityMatrix rho = state.to_density();
    AutoContext ctx(rho, tol, restarts, seed);

    std::vector<std::string> names = criteria;
    if (names.size() == 1 && names.front() == "all") names = criterion_catalog();
    for (const std::string& name : names)
        if (std::find(criterion_catalog().begin(), criterion_catalog().end(), name) ==
            criterion_catalog().end())
            throw usage_error("unknown criterion: " + name);

    BatteryReport report;
    for (const std::string& name : names) {
        CriterionOutcome outcome = run_criterion(name, ctx, ops_source, file_ops);
        if (outcome.applicable && outcome.result.detected) report.detected_by.push_back(name);
        report.outcomes.push_back(std::move(outcome));
    }
    return report;
}

std::string report_to_json(const BatteryReport& report) {
    json j;
    json crit = json::object();
    for (const CriterionOutcome& o : report.outcomes) {
        json row;
        row["applicable"] = o.applicable;
        if (o.applicable) {
            row["lhs"] = o.result.lhs;
            row["rhs"] = o.result.rhs;
            row["margin"] = o.result.margin;
            row["detected"] = o.result.detected;
            row["tolerance"] = o.result.tolerance;
            row["ops"] = o.provenance;
        } else {
            row["error"] = o.error;
        }
        crit[o.name] = std::move(row);
    }
    j["criteria"] = std::move(crit);
    j["detected_by"] = report.detected_by;
    return j.dump(2) + "\n";
}

namespace {

ComplexMatrix matrix_from_json(const json& j) {
    int rows = j.at("rows").get<int>();
    int cols = j.at("cols").get<int>();
    const json& entries = j.at("entries");
    if (int(entries.size()) != rows * cols)
        throw usage_error("operator entry count does not match rows x cols");
    std::vector<cplx> data;
    for (const json& e : entries) {
        if (!e.is_array() || e.size() != 2) throw usage_error("entries must be [re, im] pairs");
        data.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return ComplexMatrix(rows, cols, std::move(data));
}

}  // namespace

LocalOperatorSet ops_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
        LocalOperatorSet ops;
        for (const json& pair : j.at("pairs"))
            ops.pairs.push_back({matrix_from_json(pair.at("p")), matrix_from_json(pair.at("q"))});
        return ops;
    } catch (const json::exception& e) {
        throw usage_error(std::string("malformed operator file: ") + e.what());
    }
}

LocalOperatorSet load_ops(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw usage_error("cannot open operator file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ops_from_json(ss.str());
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "param,lhs,rhs,margin,detected\n";
    for (const SweepRow& r : rows) {
        out += format_double(r.param) + "," + format_double(r.lhs) + "," + format_double(r.rhs) +
               "," + format_double(r.margin) + "," + (r.detected ? "true" : "false") + "\n";
    }
    return out;
}

CriterionSpec spec_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
        CriterionSpec spec;
        spec.n_parties = j.at("n_parties").get<int>();
        spec.lhs_power = Rational::parse(j.at("lhs_power").is_string()
                                             ? j.at("lhs_power").get<std::string>()
                                             : std::to_string(j.at("lhs_power").get<long long>()));
        for (const json& t : j.at("terms")) {
            SpecTerm term;
            term.weight = Rational::parse(t.at("weight").is_string()
                                              ? t.at("weight").get<std::string>()
                                              : std::to_string(t.at("weight").get<long long>()));
            for (const json& f : t.at("factors")) {
                SpecFactor factor;
                factor.party = f.at("party").get<int>();
                std::string slot = f.at("slot").get<std::string>();
                if (slot != "P" && slot != "Q") throw usage_error("slot must be P or Q");
                factor.slot = slot == "P" ? Slot::P : Slot::Q;
                if (f.contains("exponent"))
                    factor.inner_exponent = Rational::parse(
                        f.at("exponent").is_string() ? f.at("exponent").get<std::string>()
                                                     : std::to_string(f.at("exponent").get<long long>()));
                term.factors.push_back(factor);
            }
            spec.terms.push_back(std::move(term));
        }
        return spec;
    } catch (const json::exception& e) {
        throw usage_error(std::string("malformed spec file: ") + e.what());
    }
}

CriterionSpec load_spec(const std::string& name_or_path) {
    for (const std::string& name : builtin_spec_names())
        if (name == name_or_path) return builtin_spec(name);
    std::ifstream f(name_or_path, std::ios::binary);
    if (!f) throw usage_error("not a builtin spec and not a readable file: " + name_or_path);
    std::stringstream ss;
    ss << f.rdbuf();
    return spec_from_json(ss.str());
}

SoundnessOutcome soundness_fuzz(const CriterionSpec& spec, const SubsystemShape& shape,
                                int n_samples, std::uint64_t seed, int ops_per_state) {
    SoundnessOutcome out;
    out.spec_report = check_soundness(spec);
    if (!out.spec_report.sound) return out;
    if (spec.n_parties != shape.parties())
        throw usage_error("spec party count does not match shape " + shape.str());

    out.ran = true;
    out.samples = n_samples;
    double max_margin = -1e300;
    for (int i = 0; i < n_samples; ++i) {
        std::uint64_t s = derive_seed(seed, std::uint64_t(i));
        Rng rng(derive_seed(s, 0xA11Cull));
        int n_terms = rng.uniform_int(1, 6);
        DensityMatrix rho = random_separable(shape, n_terms, s);
        for (int o = 0; o < ops_per_state; ++o) {
            Rng op_rng(derive_seed(s, 0x0B5E55ull + std::uint64_t(o)));
            LocalOperatorSet ops;
            for (int k = 0; k < shape.parties(); ++k) {
                int d = shape.local_dim(k);
                ComplexMatrix p(d, d), q(d, d);
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c) {
                        p(r, c) = op_rng.cgauss();
                        q(r, c) = op_rng.cgauss();
                    }
                ops.pairs.push_back({std::move(p), std::move(q)});
            }
            EvaluationResult res = evaluate_spec(spec, ops, rho, kDefaultTolerance);
            max_margin = std::max(max_margin, res.margin);
        }
    }
    out.max_margin = max_margin;
    out.passed = max_margin <= 1e-9;
    return out;
}

}  // namespace qsep

#pragma once

#include <map>

#include "qsep/witness.hpp"

namespace qsep {

/// On-disk density matrix: {"shape":[2,2,2],"entries":[[re,im],...],"metadata":{...}},
/// entries row-major, (prod dims)^2 of them.
struct StateFile {
    SubsystemShape shape;
    ComplexMatrix matrix;
    std::map<std::string, std::string> metadata;

    DensityMatrix to_density() const { return DensityMatrix(matrix, shape); }
};

std::string state_to_json(const StateFile& state);
StateFile state_from_json(const std::string& text);
void save_state(const std::string& path, const StateFile& state);
StateFile load_state(const std::string& path);

/// Families: ghz(n), w(n), bell, rho-alpha(alpha), rho-abc(a,b,c), werner(p),
/// white-noise(p,d), random-pure(shape), random-density(shape,rank),
/// random-separable(shape,terms).
StateFile gen_state(const std::string& family, const std::map<std::string, std::string>& params,
                    std::uint64_t seed);

struct CriterionOutcome {
    std::string name;
    bool applicable = false;
    std::string error;        // set when not applicable / evaluation failed
    EvaluationResult result;
    std::string provenance;   // how the operators were chosen
};

struct BatteryReport {
    std::vector<CriterionOutcome> outcomes;
    std::vector<std::string> detected_by;
};

enum class OpsSource { Auto, File };

const std::vector<std::string>& criterion_catalog();

BatteryReport analyze(const StateFile& state, const std::vector<std::string>& criteria,
                      OpsSource ops_source, const std::optional<LocalOperatorSet>& file_ops,
                      double tol = kDefaultTolerance, int restarts = 16, std::uint64_t seed = 0);

std::string report_to_json(const BatteryReport& report);

LocalOperatorSet ops_from_json(const std::string& text);
LocalOperatorSet load_ops(const std::string& path);

/// CSV with header param,lhs,rhs,margin,detected; shortest round-trip doubles.
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

struct SoundnessOutcome {
    SoundnessReport spec_report;
    bool ran = false;          // false when the spec was refused as unsound
    double max_margin = 0;
    int samples = 0;
    bool passed = false;       // ran and max margin <= 1e-9
};

CriterionSpec spec_from_json(const std::string& text);
CriterionSpec load_spec(const std::string& name_or_path);

/// Samples random separable states and random operator sets against a spec;
/// any positive margin beyond 1e-9 falsifies soundness.
SoundnessOutcome soundness_fuzz(const CriterionSpec& spec, const SubsystemShape& shape,
                                int n_samples, std::uint64_t seed, int ops_per_state = 20);

SubsystemShape parse_shape(const std::string& text);                       // "2x2x2"
std::map<std::string, std::string> parse_params(const std::string& text);  // "a=1,b=2"
std::string format_double(double v);  // shortest string that parses back exactly

}  // namespace qsep

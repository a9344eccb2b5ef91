#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qsep/eig.hpp"
#include "qsep/io.hpp"

namespace py = pybind11;
using namespace qsep;

namespace {

ComplexMatrix matrix_from_array(py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> arr) {
    if (arr.ndim() != 2) throw invariant_error("expected a 2-D array");
    int rows = int(arr.shape(0)), cols = int(arr.shape(1));
    std::vector<cplx> data(std::size_t(rows) * std::size_t(cols));
    auto r = arr.unchecked<2>();
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) data[std::size_t(i) * cols + j] = r(i, j);
    return ComplexMatrix(rows, cols, std::move(data));
}

py::array_t<std::complex<double>> matrix_to_array(const ComplexMatrix& m) {
    py::array_t<std::complex<double>> arr({m.rows(), m.cols()});
    auto w = arr.mutable_unchecked<2>();
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) w(i, j) = m(i, j);
    return arr;
}

std::vector<cplx> vector_from_array(py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> arr) {
    if (arr.ndim() != 1) throw invariant_error("expected a 1-D array");
    std::vector<cplx> out(std::size_t(arr.shape(0)));
    auto r = arr.unchecked<1>();
    for (py::ssize_t i = 0; i < arr.shape(0); ++i) out[std::size_t(i)] = r(i);
    return out;
}

DensityMatrix density_from(py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> arr,
                           const std::vector<int>& dims) {
    return DensityMatrix(matrix_from_array(arr), SubsystemShape(dims));
}

py::dict result_to_dict(const EvaluationResult& r) {
    py::dict d;
    d["lhs"] = r.lhs;
    d["rhs"] = r.rhs;
    d["margin"] = r.margin;
    d["detected"] = r.detected;
    d["tolerance"] = r.tolerance;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Separability analysis toolkit: entanglement criteria and witness search";

    m.def("kron", [](py::array_t<std::complex<double>> a, py::array_t<std::complex<double>> b) {
        return matrix_to_array(kron(matrix_from_array(a), matrix_from_array(b)));
    });
    m.def("dagger", [](py::array_t<std::complex<double>> a) {
        return matrix_to_array(dagger(matrix_from_array(a)));
    });
    m.def("partial_transpose",
          [](py::array_t<std::complex<double>> rho, const std::vector<int>& dims, int party) {
              return matrix_to_array(partial_transpose(matrix_from_array(rho), SubsystemShape(dims), party));
          },
          py::arg("rho"), py::arg("dims"), py::arg("party"));
    m.def("partial_trace",
          [](py::array_t<std::complex<double>> rho, const std::vector<int>& dims,
             const std::vector<int>& keep) {
              return matrix_to_array(partial_trace(matrix_from_array(rho), SubsystemShape(dims), keep));
          },
          py::arg("rho"), py::arg("dims"), py::arg("keep"));
    m.def("hermitian_eig", [](py::array_t<std::complex<double>> h) {
        HermitianEigenSystem es = hermitian_eig(matrix_from_array(h));
        return py::make_tuple(es.eigenvalues, matrix_to_array(es.eigenvectors));
    });
    m.def("psd_power", [](py::array_t<std::complex<double>> o, double x) {
        return matrix_to_array(psd_power(matrix_from_array(o), x));
    });
    m.def("expectation", [](py::array_t<std::complex<double>> rho, py::array_t<std::complex<double>> o) {
        return expectation(matrix_from_array(rho), matrix_from_array(o));
    });

    m.def("ghz", [](int n) { return ghz(n).amplitudes(); }, py::arg("n_parties"));
    m.def("w_state", [](int n) { return w_state(n).amplitudes(); }, py::arg("n_parties"));
    m.def("rho_abc", [](double a, double b, double c) { return matrix_to_array(rho_abc(a, b, c).matrix()); });
    m.def("rho_alpha", [](double alpha) { return matrix_to_array(rho_alpha(alpha).matrix()); });
    m.def("werner", [](double p) { return matrix_to_array(werner(p).matrix()); });
    m.def("white_noise_mix",
          [](py::array_t<std::complex<double>> psi, const std::vector<int>& dims, double p) {
              return matrix_to_array(
                  white_noise_mix(PureState(vector_from_array(psi), SubsystemShape(dims)), p).matrix());
          },
          py::arg("psi"), py::arg("dims"), py::arg("p"));
    m.def("random_density", [](int dim, int rank, std::uint64_t seed) {
        return matrix_to_array(random_density(dim, rank, seed).matrix());
    });
    m.def("random_separable", [](const std::vector<int>& dims, int n_terms, std::uint64_t seed) {
        return matrix_to_array(random_separable(SubsystemShape(dims), n_terms, seed).matrix());
    });

    m.def("builtin_spec_names", [] { return builtin_spec_names(); });
    m.def("check_soundness", [](const std::string& name) {
        SoundnessReport r = check_soundness(builtin_spec(name));
        return py::make_tuple(r.sound, r.str());
    });
    m.def("ppt_min_eigenvalue",
          [](py::array_t<std::complex<double>> rho, const std::vector<int>& dims,
             const std::vector<int>& bipartition) {
              return ppt_diagnostics(density_from(rho, dims), bipartition).min_eigenvalue;
          },
          py::arg("rho"), py::arg("dims"), py::arg("bipartition"));
    m.def("two_qubit_witness_margin", [](py::array_t<std::complex<double>> rho) {
        DensityMatrix dm = density_from(rho, {2, 2});
        WitnessCandidate w = two_qubit_witness(dm);
        return evaluate_witness(dm, w).margin;
    });
    m.def("optimize_E",
          [](py::array_t<std::complex<double>> rho, int restarts, std::uint64_t seed) {
              auto [basis, e] = optimize_E(density_from(rho, {2, 2, 2}), restarts, seed);
              return py::make_tuple(e, std::vector<double>(basis.angles.begin(), basis.angles.end()));
          },
          py::arg("rho"), py::arg("restarts") = 32, py::arg("seed") = 0);
    m.def("evaluate_E",
          [](py::array_t<std::complex<double>> rho, const std::vector<double>& angles) {
              if (angles.size() != 12) throw invariant_error("expected 12 basis angles");
              BasisPoint pt;
              std::copy(angles.begin(), angles.end(), pt.angles.begin());
              return evaluate_E(density_from(rho, {2, 2, 2}), pt.to_basis());
          },
          py::arg("rho"), py::arg("angles"));

    m.def("analyze",
          [](py::array_t<std::complex<double>> rho, const std::vector<int>& dims,
             const std::vector<std::string>& criteria, double tol, int restarts, std::uint64_t seed) {
              StateFile state;
              state.shape = SubsystemShape(dims);
              state.matrix = matrix_from_array(rho);
              BatteryReport report =
                  analyze(state, criteria, OpsSource::Auto, std::nullopt, tol, restarts, seed);
              py::dict out;
              py::dict rows;
              for (const CriterionOutcome& o : report.outcomes) {
                  py::dict row;
                  row["applicable"] = o.applicable;
                  if (o.applicable) {
                      row["result"] = result_to_dict(o.result);
                      row["ops"] = o.provenance;
                  } else {
                      row["error"] = o.error;
                  }
                  rows[py::str(o.name)] = row;
              }
              out["criteria"] = rows;
              out["detected_by"] = report.detected_by;
              return out;
          },
          py::arg("rho"), py::arg("dims"), py::arg("criteria") = std::vector<std::string>{"all"},
          py::arg("tol") = kDefaultTolerance, py::arg("restarts") = 16, py::arg("seed") = 0);

    m.def("sweep",
          [](const std::string& family, double start, double stop, double step,
             const std::string& method, std::uint64_t seed, double tol, int restarts) {
              SweepRequest req{family, start, stop, step, method, seed, tol, restarts};
              py::list rows;
              for (const SweepRow& r : sweep(req)) {
                  py::dict d;
                  d["param"] = r.param;
                  d["lhs"] = r.lhs;
                  d["rhs"] = r.rhs;
                  d["margin"] = r.margin;
                  d["detected"] = r.detected;
                  rows.append(d);
              }
              return rows;
          },
          py::arg("family"), py::arg("start"), py::arg("stop"), py::arg("step"), py::arg("method"),
          py::arg("seed") = 0, py::arg("tol") = kDefaultTolerance, py::arg("restarts") = 32);

    m.def("soundness_fuzz",
          [](const std::string& name, const std::vector<int>& dims, int samples, std::uint64_t seed) {
              SoundnessOutcome o = soundness_fuzz(builtin_spec(name), SubsystemShape(dims), samples, seed);
              py::dict d;
              d["sound_spec"] = o.spec_report.sound;
              d["ran"] = o.ran;
              d["max_margin"] = o.max_margin;
              d["passed"] = o.passed;
              return d;
          },
          py::arg("spec"), py::arg("dims"), py::arg("samples") = 100, py::arg("seed") = 0);

    py::register_exception<usage_error>(m, "UsageError");
    py::register_exception<invariant_error>(m, "InvariantError");
    py::register_exception<witness_error>(m, "WitnessError");

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}

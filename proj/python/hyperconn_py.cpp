#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hyperconn/cli.hpp"
#include "hyperconn/core.hpp"
#include "hyperconn/error.hpp"
#include "hyperconn/estimators.hpp"
#include "hyperconn/hyperconnectome.hpp"
#include "hyperconn/learn.hpp"
#include "hyperconn/simulation.hpp"

namespace py = pybind11;
using namespace hyperconn;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

TimeSeriesMatrix to_timeseries(const Array& x) {
  if (x.ndim() != 2) throw py::value_error("expected a 2-D array (variables x samples)");
  const auto m = static_cast<Index>(x.shape(0));
  const auto n = static_cast<Index>(x.shape(1));
  return TimeSeriesMatrix(m, n, std::vector<double>(x.data(), x.data() + m * n));
}

Array to_array(const TimeSeriesMatrix& ts) {
  Array out({ts.rows(), ts.cols()});
  std::copy(ts.values().begin(), ts.values().end(), out.mutable_data());
  return out;
}

Array square(std::span<const double> values, Index m) {
  Array out({m, m});
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

std::vector<FeatureVector> to_features(const Array& x) {
  if (x.ndim() != 2) throw py::value_error("expected a 2-D feature array (examples x features)");
  const auto rows = static_cast<Index>(x.shape(0));
  const auto cols = static_cast<Index>(x.shape(1));
  std::vector<FeatureVector> out;
  out.reserve(rows);
  for (Index i = 0; i < rows; ++i) {
    out.push_back({std::vector<double>(x.data() + i * cols, x.data() + (i + 1) * cols),
                   FeatureSchema{FeatureKind::Hypergraph, cols, 1, false}});
  }
  return out;
}

SampleRows rows_of(const Array& x, std::vector<std::vector<double>>& storage) {
  if (x.ndim() == 1) {
    storage.emplace_back(x.data(), x.data() + x.shape(0));
  } else if (x.ndim() == 2) {
    for (py::ssize_t i = 0; i < x.shape(0); ++i) {
      storage.emplace_back(x.data() + i * x.shape(1), x.data() + (i + 1) * x.shape(1));
    }
  } else {
    throw py::value_error("expected a 1-D or 2-D array");
  }
  SampleRows rows;
  for (const auto& r : storage) rows.emplace_back(r);
  return rows;
}

}  // namespace

PYBIND11_MODULE(_hyperconn, m) {
  m.doc() = "Connectomes and entropic total-correlation hyper-connectomes";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("tuple_count", &tuple_count, py::arg("m"), py::arg("d"));
  m.def("tuple_rank", [](const std::vector<Index>& t, Index vars) { return tuple_rank(t, vars); },
        py::arg("tuple"), py::arg("m"));
  m.def("tuple_unrank", &tuple_unrank, py::arg("rank"), py::arg("m"), py::arg("d"));

  m.def("pearson",
        [](const Array& x, const Array& y) {
          return pearson({x.data(), static_cast<std::size_t>(x.size())},
                         {y.data(), static_cast<std::size_t>(y.size())});
        },
        py::arg("x"), py::arg("y"));
  m.def("connectome",
        [](const Array& x) {
          const auto cm = connectome(to_timeseries(x));
          return square(cm.entries(), cm.size());
        },
        py::arg("timeseries"), "Pearson correlation matrix of a variables x samples array.");

  m.def("entropy_exact", [](const Array& x) {
    return entropy_exact({x.data(), static_cast<std::size_t>(x.size())});
  });
  m.def("joint_entropy_exact", [](const Array& x) {
    std::vector<std::vector<double>> storage;
    return joint_entropy_exact(rows_of(x, storage));
  });
  m.def("total_correlation_exact", [](const Array& x) {
    std::vector<std::vector<double>> storage;
    return total_correlation_exact(rows_of(x, storage));
  });
  m.def("total_correlation_kl_exact", [](const Array& x) {
    std::vector<std::vector<double>> storage;
    return total_correlation_kl_exact(rows_of(x, storage));
  });
  m.def("gaussian_tc_closed_form", [](const Array& r) {
    if (r.ndim() != 2 || r.shape(0) != r.shape(1)) throw py::value_error("expected a square matrix");
    return gaussian_tc_closed_form({r.data(), static_cast<std::size_t>(r.size())}, r.shape(0));
  });

  m.def("alg1_total_correlation",
        [](const Array& x, Index d, double epsilon, const std::string& variant, unsigned workers) {
          const auto ts = to_timeseries(x);
          SymmetricTensor t(1, 1);
          {
            py::gil_scoped_release release;
            t = alg1_total_correlation(ts, d, EpsilonThreshold(epsilon), parse_variant(variant), workers);
          }
          return Array(static_cast<py::ssize_t>(t.size()), t.weights().data());
        },
        py::arg("timeseries"), py::arg("d") = 3, py::arg("epsilon") = 1e-5, py::arg("variant") = "paper",
        py::arg("workers") = 1,
        "Total-correlation weights of every sorted d-tuple, in tuple-rank order.");

  py::class_<HyperConnectome>(m, "HyperConnectome")
      .def_property_readonly("m", &HyperConnectome::variables)
      .def_property_readonly("d", &HyperConnectome::order)
      .def_readonly("epsilon", &HyperConnectome::epsilon)
      .def_property_readonly("variant", [](const HyperConnectome& hc) { return std::string(to_string(hc.variant)); })
      .def_readonly("roi_labels", &HyperConnectome::roi_labels)
      .def_readonly("log_base", &HyperConnectome::log_base)
      .def_property_readonly("weights",
                             [](const HyperConnectome& hc) {
                               const auto w = hc.tensor.weights();
                               return Array(static_cast<py::ssize_t>(w.size()), w.data());
                             })
      .def("weight", [](const HyperConnectome& hc, const std::vector<Index>& t) { return hc.tensor.at(t); })
      .def("significant_edges",
           [](const HyperConnectome& hc, double threshold, bool include_degenerate) {
             std::vector<std::pair<std::vector<Index>, double>> out;
             for (const auto& e : significant_edges(hc, threshold, include_degenerate).edges) {
               out.emplace_back(e.tuple, e.weight);
             }
             return out;
           },
           py::arg("threshold") = kDefaultEdgeThreshold, py::arg("include_degenerate") = true)
      .def("pairwise_reduce",
           [](const HyperConnectome& hc, bool include_degenerate) {
             return square(pairwise_reduce(hc, include_degenerate), hc.variables());
           },
           py::arg("include_degenerate") = true)
      .def("to_bits", &to_bits)
      .def("to_json", &serialize_hc_text)
      .def_static("from_json", [](const std::string& text) { return deserialize_hc_text(text); });

  m.def("build_hyperconnectome",
        [](const Array& x, Index d, double epsilon, const std::string& variant, unsigned workers) {
          const auto ts = to_timeseries(x);
          py::gil_scoped_release release;
          return build_hyperconnectome(ts, d, EpsilonThreshold(epsilon), parse_variant(variant), workers);
        },
        py::arg("timeseries"), py::arg("d") = 3, py::arg("epsilon") = 1e-5, py::arg("variant") = "paper",
        py::arg("workers") = 1);

  m.def("gen_dataset",
        [](Index nx, Index ny, Index n, std::uint64_t seed) {
          const Dataset ds = gen_dataset(nx, ny, n, seed);
          py::list subjects;
          std::vector<std::string> labels;
          for (const auto& s : ds.subjects) {
            subjects.append(to_array(s.data));
            labels.push_back(s.label);
          }
          return py::make_tuple(subjects, labels);
        },
        py::arg("nx"), py::arg("ny"), py::arg("n") = 20, py::arg("seed") = 0,
        "Returns (list of 3 x n arrays, list of 'X'/'Y' labels).");
  m.def("oracle_pairwise_corr_y", &oracle_pairwise_corr_y, py::arg("i") = 0, py::arg("j") = 1);
  m.def("oracle_total_corr_y", &oracle_total_corr_y);

  py::class_<LinearModel>(m, "LinearModel")
      .def_property_readonly("weights", &LinearModel::weights)
      .def_property_readonly("bias", &LinearModel::bias)
      .def("predict", [](const LinearModel& model, const Array& x) {
        std::vector<FeatureVector> f = to_features(x);
        return svm_predict(model, f);
      });

  m.def("svm_train",
        [](const Array& x, const std::vector<int>& labels, double lambda, Index epochs, std::uint64_t seed) {
          const auto f = to_features(x);
          return svm_train(f, labels, SvmConfig{lambda, epochs, seed});
        },
        py::arg("features"), py::arg("labels"), py::arg("lambda_") = 1e-4, py::arg("epochs") = 200,
        py::arg("seed") = 0, "Labels are +1 / -1.");
  m.def("metrics",
        [](const std::vector<int>& predicted, const std::vector<int>& truth, int positive) {
          const Metrics r = metrics(predicted, truth, positive);
          return py::make_tuple(r.accuracy, r.f1);
        },
        py::arg("predicted"), py::arg("truth"), py::arg("positive_class") = 1);
  m.def("two_sample_ttest",
        [](const std::vector<double>& a, const std::vector<double>& b, const std::string& kind) {
          const TTestResult r = two_sample_ttest(a, b, kind == "welch" ? TTestKind::Welch : TTestKind::Pooled);
          return py::make_tuple(r.t, r.p);
        },
        py::arg("a"), py::arg("b"), py::arg("kind") = "pooled");

  m.def("main",
        [](const std::vector<std::string>& args) {
          std::ostringstream out;
          std::ostringstream err;
          int code = 0;
          {
            py::gil_scoped_release release;
            code = cli::run(args, out, err);
          }
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line interface; returns (exit code, stdout, stderr).");
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>
#include <sstream>

#include "cim/config.hpp"
#include "cim/experiment.hpp"
#include "cim/report.hpp"

namespace py = pybind11;
using namespace cim;

namespace {

py::dict row_dict(const ResultRow& r) {
  py::dict d;
  d["scheme"] = std::string(to_string(r.at.scheme));
  d["model"] = std::string(to_string(r.at.model));
  d["fp"] = to_string(r.at.fp);
  d["axis"] = std::string(to_string(r.at.axis));
  d["value"] = r.at.value;
  d["runs"] = r.runs;
  d["mean_n_true"] = r.mean_n_true;
  d["std_n_true"] = r.std_n_true;
  d["mean_n_false"] = r.mean_n_false;
  d["mean_decided_true"] = r.mean_decided_true;
  d["mean_seconds"] = r.mean_seconds;
  return d;
}

std::unique_ptr<SeedAgent> heuristic(const std::string& name) {
  return std::make_unique<HeuristicAgent>(parse_strategy(name));
}

// One episode between two fixed strategies; returns the per-step log.
py::list simulate(const std::string& tp, const std::string& fp, const std::string& model, std::uint64_t seed,
                  std::size_t rounds, double p_nv, const std::string& dataset) {
  EpisodeConfig cfg;
  cfg.model.kind = parse_trust_kind(model);
  cfg.seed = seed;
  cfg.rounds = rounds;
  cfg.p_nv = p_nv;
  Episode ep(load_dataset(dataset), cfg);
  auto tp_agent = heuristic(tp);
  auto fp_agent = heuristic(fp);
  {
    py::gil_scoped_release release;
    run_episode(ep, *tp_agent, *fp_agent);
  }
  py::list out;
  for (const RoundLog& l : ep.logs()) {
    py::dict d;
    d["round"] = l.round;
    d["party"] = std::string(to_string(l.party));
    d["strategy"] = std::string(to_string(l.strategy));
    d["fired"] = std::string(to_string(l.fired));
    d["seed"] = l.seed;
    d["n_true"] = l.n_true;
    d["n_false"] = l.n_false;
    d["decided_true"] = l.decided_true;
    d["decided_false"] = l.decided_false;
    d["reward"] = l.reward;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_cim, m) {
  m.doc() = "Competitive influence simulation on subjective-logic opinions";

  py::class_<Opinion>(m, "Opinion")
      .def(py::init<double, double, double, double>(), py::arg("b"), py::arg("d"), py::arg("u"),
           py::arg("a") = 0.5)
      .def_readwrite("b", &Opinion::b)
      .def_readwrite("d", &Opinion::d)
      .def_readwrite("u", &Opinion::u)
      .def_readwrite("a", &Opinion::a)
      .def("__eq__", [](const Opinion& x, const Opinion& y) { return x == y; })
      .def("__repr__", [](const Opinion& o) {
        std::ostringstream s;
        s << "Opinion(b=" << o.b << ", d=" << o.d << ", u=" << o.u << ", a=" << o.a << ")";
        return s.str();
      });

  m.def(
      "from_evidence",
      [](double r, double s, double w, double a) { return opinion_from_evidence({r, s, w}, a); },
      py::arg("r"), py::arg("s"), py::arg("w") = 2.0, py::arg("a") = 0.5);
  m.def(
      "project",
      [](const Opinion& op) {
        const Projection p = project(op);
        return std::make_pair(p.belief, p.disbelief);
      },
      "Projected (belief, disbelief) probabilities.");
  m.def("dissonance", &dissonance);
  m.def("discount", &discount, py::arg("sender"), py::arg("c"));
  m.def("fuse", &fuse, py::arg("receiver"), py::arg("sender"), py::arg("c"));
  m.def("vacuity_maximize", &vacuity_maximize);
  m.def(
      "trust",
      [](const std::string& model, const Opinion& i, const Opinion& j) {
        TrustModel t;
        t.kind = parse_trust_kind(model);
        return trust_coefficient(t, i, j);
      },
      py::arg("model"), py::arg("receiver"), py::arg("sender"));

  m.def(
      "graph_size",
      [](const std::string& path) {
        const auto g = load_dataset(path);
        return std::make_pair(g->num_nodes(), g->num_edges());
      },
      py::arg("dataset") = "", "(nodes, edges) of a dataset; empty selects the bundled one.");

  m.def("simulate", &simulate, py::arg("tp"), py::arg("fp"), py::arg("model") = "uom", py::arg("seed") = 1,
        py::arg("rounds") = 50, py::arg("p_nv") = 1.0, py::arg("dataset") = "",
        "Plays one episode between two fixed strategies and returns the step log.");

  m.def(
      "run_experiment",
      [](const std::string& config, const std::string& out_dir) {
        ExperimentSpec spec = load_spec(config);
        if (!out_dir.empty()) spec.out_dir = out_dir;
        ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(spec);
        }
        py::list rows;
        for (const ResultRow& row : r.rows) rows.append(row_dict(row));
        return rows;
      },
      py::arg("config"), py::arg("out_dir") = "", "Runs an experiment config file; returns aggregated rows.");

  m.def(
      "train",
      [](const std::string& scheme, const std::string& opponent, const std::string& model,
         const std::string& policy_dir, std::size_t updates, std::uint64_t seed, const std::string& dataset) {
        ExperimentSpec spec;
        spec.dataset = dataset;
        spec.training.policy_dir = policy_dir;
        spec.training.ppo.updates = updates;
        PolicyStore store(load_dataset(spec.dataset), spec.env, spec.training, seed);
        const Scheme s = parse_scheme(scheme);
        const TrustKind k = parse_trust_kind(model);
        const Opponent o = parse_opponent(opponent);
        {
          py::gil_scoped_release release;
          store.tp_policy(s, k, o);
        }
        return store.tp_path(s, k, o);
      },
      py::arg("scheme"), py::arg("opponent"), py::arg("model") = "uom", py::arg("policy_dir") = "policies",
      py::arg("updates") = 200, py::arg("seed") = 1, py::arg("dataset") = "",
      "Trains (or loads) a true-party policy and returns its file path.");

  m.def(
      "report",
      [](const std::string& layout, const std::string& csv_path, const std::string& metric) {
        std::ifstream in(csv_path);
        if (!in) throw std::runtime_error("cannot read " + csv_path);
        std::ostringstream out;
        const Layout l = parse_layout(layout);
        if (l == Layout::Table2) {
          emit_bench_report(out, read_bench_csv(in));
        } else {
          ReportOptions opts;
          opts.metric = parse_metric(metric);
          emit_report(out, l, read_results_csv(in), opts);
        }
        return out.str();
      },
      py::arg("layout"), py::arg("csv_path"), py::arg("metric") = "n_true");

  m.attr("strategies") = std::vector<std::string>{"af", "bf", "sgf", "cf", "random"};
  m.attr("schemes") = std::vector<std::string>{"drim-a", "drim-na", "storm", "cstorm"};
}

// Python bindings for the core operations: samplers, exact mechanism
// evaluation, the softmax relaxation, training and the verification oracles.

#include "caama/experiment.hpp"
#include "caama/mech.hpp"
#include "caama/verify.hpp"
#include "caama/version.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace caama;

namespace {

DistributionSpec make_spec(const std::string& kind, int n, int m, double alpha,
                           double epsilon, double epsilon1, bool er_figure_mode,
                           uint64_t seed) {
  DistributionSpec spec;
  spec.kind = dist_kind_from_name(kind);
  spec.n = n;
  spec.m = m;
  spec.alpha = alpha;
  spec.epsilon = epsilon;
  spec.epsilon1 = epsilon1;
  spec.er_figure_mode = er_figure_mode;
  spec.seed = seed;
  spec.validate();
  return spec;
}

}  // namespace

PYBIND11_MODULE(_caama, mod) {
  mod.doc() = "correlation-aware affine maximizer auctions";
  mod.attr("__version__") = version_tag();

  py::class_<DistributionSpec>(mod, "DistributionSpec")
      .def(py::init(&make_spec), py::arg("kind"), py::arg("n"), py::arg("m"),
           py::arg("alpha") = 1.0, py::arg("epsilon") = 0.1,
           py::arg("epsilon1") = 0.05, py::arg("er_figure_mode") = false,
           py::arg("seed") = 0)
      .def_readonly("n", &DistributionSpec::n)
      .def_readonly("m", &DistributionSpec::m)
      .def_readwrite("seed", &DistributionSpec::seed)
      .def("__repr__", [](const DistributionSpec& s) {
        return "DistributionSpec(" + dist_kind_name(s.kind) + ", n=" +
               std::to_string(s.n) + ", m=" + std::to_string(s.m) + ")";
      });

  mod.def(
      "sample",
      [](const DistributionSpec& spec, int count) {
        const Dataset d = sample(spec, count);
        return d.profiles;
      },
      py::arg("spec"), py::arg("count"),
      "Draw count valuation profiles as a list of (n, m) arrays.");

  mod.def("equal_revenue_inverse_cdf", &equal_revenue_inverse_cdf, py::arg("u"),
          py::arg("epsilon"));

  py::class_<AmaParams>(mod, "AmaParams")
      .def(py::init([](std::vector<Matrix> menu, Vector weights, Vector boosts) {
             AmaParams p;
             p.menu = std::move(menu);
             p.weights = std::move(weights);
             p.boosts = std::move(boosts);
             p.validate(false);
             return p;
           }),
           py::arg("menu"), py::arg("weights"), py::arg("boosts"))
      .def_readonly("menu", &AmaParams::menu)
      .def_readonly("weights", &AmaParams::weights)
      .def_readonly("boosts", &AmaParams::boosts)
      .def("size", &AmaParams::size);

  mod.def("deterministic_menu", &deterministic_menu, py::arg("n"), py::arg("m"));

  py::class_<AuctionOutcome>(mod, "AuctionOutcome")
      .def_readonly("allocation", &AuctionOutcome::allocation)
      .def_readonly("pay_ama", &AuctionOutcome::pay_ama)
      .def_readonly("pay_cor", &AuctionOutcome::pay_cor)
      .def_readonly("utilities", &AuctionOutcome::utilities)
      .def_readonly("winner_index", &AuctionOutcome::winner_index)
      .def("revenue", &AuctionOutcome::revenue);

  mod.def(
      "ama_outcome",
      [](const Matrix& values, const AmaParams& params) {
        return ama_outcome(ValuationProfile{values}, params);
      },
      py::arg("values"), py::arg("params"));
  mod.def(
      "vcg_outcome",
      [](const Matrix& values) { return vcg_outcome(ValuationProfile{values}); },
      py::arg("values"));
  mod.def("post_process_ir", &post_process_ir, py::arg("outcome"));

  mod.def(
      "asw",
      [](int k, const Matrix& values, const AmaParams& params) {
        return asw(k, ValuationProfile{values}, params);
      },
      py::arg("k"), py::arg("values"), py::arg("params"));

  py::class_<SoftOutcome>(mod, "SoftOutcome")
      .def_readonly("soft_alloc", &SoftOutcome::soft_alloc)
      .def_readonly("pay_hat", &SoftOutcome::pay_hat)
      .def_readonly("util_hat", &SoftOutcome::util_hat);

  mod.def(
      "soft_payment_utility",
      [](const Matrix& values, const AmaParams& params, double t) {
        return soft_payment_utility(ValuationProfile{values}, params, t);
      },
      py::arg("values"), py::arg("params"), py::arg("temperature"));

  py::class_<TrainConfig>(mod, "TrainConfig")
      .def(py::init<>())
      .def_static("desk_scale", &TrainConfig::desk_scale)
      .def_readwrite("total_iters", &TrainConfig::total_iters)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("menu_size", &TrainConfig::menu_size)
      .def_readwrite("temperature", &TrainConfig::temperature)
      .def_readwrite("r_target", &TrainConfig::r_target)
      .def_readwrite("gamma0", &TrainConfig::gamma0)
      .def_readwrite("step_size", &TrainConfig::step_size)
      .def_readwrite("cor_h1", &TrainConfig::cor_h1)
      .def_readwrite("cor_h2", &TrainConfig::cor_h2)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("eval_every", &TrainConfig::eval_every)
      .def_readwrite("test_size", &TrainConfig::test_size);

  mod.def("update_gamma", &update_gamma, py::arg("gamma"), py::arg("regret_batch"),
          py::arg("config"));

  py::class_<ExactMetrics>(mod, "ExactMetrics")
      .def_readonly("revenue", &ExactMetrics::revenue)
      .def_readonly("revenue_postproc", &ExactMetrics::revenue_postproc)
      .def_readonly("regret_ir_mean", &ExactMetrics::regret_ir_mean)
      .def_readonly("regret_ir_max", &ExactMetrics::regret_ir_max)
      .def_readonly("min_utility", &ExactMetrics::min_utility)
      .def_readonly("pay_ama_mean", &ExactMetrics::pay_ama_mean)
      .def_readonly("pay_cor_mean", &ExactMetrics::pay_cor_mean)
      .def("pay_cor_share", &ExactMetrics::pay_cor_share);

  mod.def(
      "train",
      [](const TrainConfig& cfg, const DistributionSpec& spec, const std::string& mode,
         const std::string& checkpoint_path) {
        const TrainResult result = train(cfg, spec, train_mode_from_name(mode));
        if (!checkpoint_path.empty())
          save_checkpoint(result.state, cfg, spec, checkpoint_path);
        return result.test;
      },
      py::arg("config"), py::arg("spec"), py::arg("mode") = "CAAMA",
      py::arg("checkpoint_path") = "",
      "Run the two-stage optimization; returns exact held-out test metrics.");

  py::class_<GenBoundInputs>(mod, "GenBoundInputs")
      .def(py::init<>())
      .def_readwrite("m1", &GenBoundInputs::m1)
      .def_readwrite("m2", &GenBoundInputs::m2)
      .def_readwrite("m3", &GenBoundInputs::m3)
      .def_readwrite("h1", &GenBoundInputs::h1)
      .def_readwrite("h2", &GenBoundInputs::h2)
      .def_readwrite("n", &GenBoundInputs::n)
      .def_readwrite("m", &GenBoundInputs::m)
      .def_readwrite("k", &GenBoundInputs::k)
      .def_readwrite("delta", &GenBoundInputs::delta);

  mod.def("gen_bound", &gen_bound, py::arg("inputs"));

  mod.def(
      "full_surplus",
      [](const std::vector<Matrix>& profiles) { return full_surplus(profiles); },
      py::arg("profiles"));

  mod.def(
      "analytic_moments",
      [](const DistributionSpec& spec) {
        const AnalyticMoments mom = analytic_moments(spec);
        py::dict out;
        out["optimal_full_surplus"] = mom.optimal_full_surplus;
        if (mom.vcg_revenue) out["vcg_revenue"] = *mom.vcg_revenue;
        return out;
      },
      py::arg("spec"));

  mod.def(
      "dama_brute_search",
      [](const DistributionSpec& spec, int weight_points, int boost_points,
         int mc_samples) {
        DamaGrid grid;
        grid.weight_points = weight_points;
        grid.boost_points = boost_points;
        grid.mc_samples = mc_samples;
        const DamaResult result = dama_brute_search(spec, grid);
        py::dict out;
        out["best_revenue"] = result.best_revenue;
        out["weights"] = result.weights;
        out["boosts"] = result.boosts;
        return out;
      },
      py::arg("spec"), py::arg("weight_points") = 33, py::arg("boost_points") = 41,
      py::arg("mc_samples") = 100000);
}

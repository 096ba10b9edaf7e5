#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mbm/config.hpp"
#include "mbm/errors.hpp"
#include "mbm/field.hpp"
#include "mbm/fractal.hpp"
#include "mbm/hurst.hpp"
#include "mbm/noise.hpp"
#include "mbm/pipelines.hpp"
#include "mbm/regularity.hpp"
#include "mbm/report.hpp"
#include "mbm/suites.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

mbm::Samples to_samples(double t_min, double step, const Array& values) {
  const auto n = static_cast<std::size_t>(values.size());
  if (n < 2) throw mbm::DomainError("need at least two samples");
  mbm::Samples s{mbm::TimeGrid(t_min, t_min + step * static_cast<double>(n - 1), step), {}};
  s.values.assign(values.data(), values.data() + n);
  return s;
}

mbm::DyadicScales scales_from(const std::array<int, 4>& s) { return {s[0], s[1], s[2], s[3]}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multifractional Brownian motion laboratory";

  auto base = py::register_exception<mbm::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<mbm::ConfigError>(m, "ConfigError", base.ptr());

  m.def("gen_brownian", [](double t_min, double t_max, double step, std::uint64_t seed) {
    return to_array(mbm::gen_brownian(mbm::TimeGrid(t_min, t_max, step), seed).values);
  }, py::arg("t_min"), py::arg("t_max"), py::arg("step"), py::arg("seed"));

  m.def("gen_fbm", [](double t_min, double t_max, double step, double hurst, std::uint64_t seed) {
    return to_array(mbm::gen_fbm(mbm::TimeGrid(t_min, t_max, step), hurst, seed).values);
  }, py::arg("t_min"), py::arg("t_max"), py::arg("step"), py::arg("hurst"), py::arg("seed"));

  m.def("hurst_eval", [](const std::string& spec, const Array& t) {
    const mbm::HurstFunction H = mbm::parse_hurst(spec);
    std::vector<double> out;
    for (py::ssize_t i = 0; i < t.size(); ++i) out.push_back(H(t.data()[i]));
    return to_array(out);
  }, py::arg("spec"), py::arg("t"));

  m.def("fbf_eval", [](bool plus, double t, double h, double t_min, double step, const Array& bm_values,
                       double truncation) {
    const mbm::Samples s = to_samples(t_min, step, bm_values);
    const mbm::BrownianPath bm{s.grid, s.values, 0};
    mbm::QuadratureConfig q;
    q.truncation = truncation;
    return mbm::fbf_eval(plus ? mbm::Side::plus : mbm::Side::minus, t, h, bm, q);
  }, py::arg("plus"), py::arg("t"), py::arg("h"), py::arg("t_min"), py::arg("step"), py::arg("bm"),
     py::arg("truncation") = 0.0);

  m.def("mbm_path", [](const std::string& hurst, double t_min, double t_max, double step, std::uint64_t seed,
                       double a_plus, double a_minus, double half_width) {
    const mbm::BrownianPath bm = mbm::gen_brownian(mbm::TimeGrid(-half_width, half_width, step), seed);
    mbm::QuadratureConfig q;
    q.truncation = half_width;
    const mbm::FieldEngine engine(bm, q, t_min, t_max);
    return py::make_tuple(to_array(engine.out_grid().times()),
                          to_array(engine.mbm(mbm::parse_hurst(hurst), a_plus, a_minus)));
  }, py::arg("hurst"), py::arg("t_min"), py::arg("t_max"), py::arg("step"), py::arg("seed"),
     py::arg("a_plus") = 1.0, py::arg("a_minus") = 0.0, py::arg("half_width") = 2.0);

  m.def("est_exponents", [](const Array& values, double t_min, double step, double t, std::array<int, 4> scales) {
    const mbm::ExponentEstimate e = mbm::est_exponents(to_samples(t_min, step, values), t, scales_from(scales));
    py::dict d;
    d["pointwise"] = e.pointwise;
    d["local"] = e.local;
    d["pointwise_at_cap"] = e.pointwise_at_cap;
    d["local_at_cap"] = e.local_at_cap;
    d["fit_r2"] = e.fit_r2;
    return d;
  }, py::arg("values"), py::arg("t_min"), py::arg("step"), py::arg("t"),
     py::arg("scales") = std::array<int, 4>{0, 0, 0, 0});

  m.def("est_frontier", [](const Array& values, double t_min, double step, double t) {
    const mbm::FrontierCurve c = mbm::est_frontier(to_samples(t_min, step, values), t);
    return py::make_tuple(to_array(c.sprime), to_array(c.sigma));
  }, py::arg("values"), py::arg("t_min"), py::arg("step"), py::arg("t"));

  m.def("project_frontier", [](const Array& sprime, const Array& sigma) {
    return to_array(mbm::project_frontier({sprime.data(), sprime.data() + sprime.size()},
                                          {sigma.data(), sigma.data() + sigma.size()}));
  }, py::arg("sprime"), py::arg("sigma"));

  m.def("est_boxdim_local", [](const Array& values, double t_min, double step, double t, double rho, int coarse,
                               int fine) {
    const mbm::DimEstimate d = mbm::est_boxdim_local(to_samples(t_min, step, values), t, rho, {coarse, fine});
    return py::make_tuple(d.value, d.lower, d.upper);
  }, py::arg("values"), py::arg("t_min"), py::arg("step"), py::arg("t"), py::arg("rho") = 0.1,
     py::arg("coarse") = 4, py::arg("fine") = 10);

  m.def("predict_boxdim_graph", &mbm::predict_boxdim_graph);
  m.def("predict_hausdim_graph", &mbm::predict_hausdim_graph);
  m.def("predict_image_dim", &mbm::predict_image_dim);
  m.def("predict_pointwise_mbm", &mbm::predict_pointwise_mbm);

  m.def("run_pipeline_json", [](const std::string& config) {
    const mbm::ExperimentConfig cfg = mbm::make_config(nlohmann::json::parse(config));
    const mbm::PipelineOutput out = mbm::run_pipeline(cfg);
    return py::make_tuple(out.csv, mbm::dump_json(out.report));
  }, py::arg("config"));

  m.def("suite_names", [] {
    std::vector<std::string> names;
    for (const auto& s : mbm::suite_registry()) names.push_back(s.name);
    return names;
  });

  m.def("verify_suite_json", [](const std::string& name, std::uint64_t seed, int workers) {
    mbm::SuiteContext ctx{seed, workers};
    py::gil_scoped_release release;
    return mbm::dump_json(mbm::to_json(mbm::verify_suite(name, ctx)));
  }, py::arg("name"), py::arg("seed") = 1, py::arg("workers") = 1);
}

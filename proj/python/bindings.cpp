#include "tdesign/channels.hpp"
#include "tdesign/designs.hpp"
#include "tdesign/haar.hpp"
#include "tdesign/irreps.hpp"
#include "tdesign/rb.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <memory>
#include <optional>

namespace py = pybind11;
using namespace tdesign;

namespace {

py::dict metrics_dict(const channels::MetricSet& m) {
  py::dict d;
  d["f"] = m.f;
  d["F"] = m.F;
  d["u"] = m.u;
  d["h"] = m.h;
  d["H"] = m.H;
  d["H_direct"] = m.H_direct;
  d["alpha_norm_sq"] = m.alpha_norm_sq;
  return d;
}

py::dict labeled_dict(const irreps::LabeledValues& v) {
  py::dict d;
  for (std::size_t i = 0; i < v.labels.size(); ++i)
    d[py::str(std::string(irreps::label_name(v.labels[i])))] = v.values(static_cast<Eigen::Index>(i));
  return d;
}

py::list curve_list(const fit::DecayCurve& c) {
  py::list out;
  for (const auto& p : c.points) out.append(py::make_tuple(p.m, p.value, p.std_error));
  return out;
}

const irreps::IrrepProjectorSet& projectors(int q) {
  static const auto one = irreps::projectors_1q();
  static const auto two = irreps::projectors_2q();
  if (q != 1 && q != 2) throw DomainError("projectors: q must be 1 or 2");
  return q == 1 ? one : two;
}

}  // namespace

PYBIND11_MODULE(_tdesign, m) {
  m.doc() = "Unitary t-designs and t-RB noise metrics";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);

  py::class_<channels::PTM>(m, "PTM")
      .def(py::init([](const RealMatrix& matrix) {
             channels::PTM l;
             l.q = qubits_for_dim(static_cast<int>(std::lround(std::sqrt(static_cast<double>(matrix.rows())))));
             if (matrix.rows() != l.dim() || matrix.cols() != l.dim()) throw DimensionError("PTM must be 4^q x 4^q");
             l.matrix = matrix;
             return l;
           }),
           py::arg("matrix"))
      .def_readonly("q", &channels::PTM::q)
      .def_readonly("matrix", &channels::PTM::matrix);

  m.def("noise1_model", &channels::noise1_model, py::arg("p"), py::arg("q"));
  m.def("noise2_model", &channels::noise2_model, py::arg("p"), py::arg("q"));
  m.def("depolarizing_ptm", &channels::depolarizing_ptm, py::arg("p"), py::arg("qubits") = 1);
  m.def("identity_ptm", &channels::identity_ptm, py::arg("qubits"));
  m.def("lindblad_ptm", &channels::lindblad_ptm, py::arg("t1"), py::arg("t2"), py::arg("chi"), py::arg("delay"),
        py::arg("include_zz"));
  m.def("ptm_from_kraus",
        [](const std::vector<ComplexMatrix>& ops) { return channels::ptm_from_kraus({ops}); }, py::arg("kraus_ops"));
  m.def("metrics", [](const channels::PTM& l) { return metrics_dict(channels::metrics(l)); }, py::arg("ptm"));
  m.def("decay_rates", [](const channels::PTM& l) { return labeled_dict(irreps::decay_rates(l, projectors(l.q))); },
        py::arg("ptm"));

  m.def("haar_frame_potential", &haar::haar_frame_potential, py::arg("d"), py::arg("t"));

  py::class_<designs::UnitaryEnsemble, std::shared_ptr<designs::UnitaryEnsemble>>(m, "UnitaryEnsemble")
      .def_property_readonly("d", &designs::UnitaryEnsemble::d)
      .def_property_readonly("size", &designs::UnitaryEnsemble::projected_size)
      .def(
          "sample",
          [](const designs::UnitaryEnsemble& e, std::uint64_t seed, int count) {
            std::mt19937_64 rng(seed);
            std::vector<ComplexMatrix> out;
            for (int i = 0; i < count; ++i) out.push_back(e.sample(rng));
            return out;
          },
          py::arg("seed"), py::arg("count") = 1);

  const auto wrap = [](designs::UnitaryEnsemble e) { return std::make_shared<designs::UnitaryEnsemble>(std::move(e)); };
  m.def("w1", [wrap](int t) { return wrap(designs::w1(t)); }, py::arg("t"));
  m.def("qudit_design", [wrap](int d, int t) { return wrap(designs::build_qudit_design(d, t)); }, py::arg("d"),
        py::arg("t"));
  m.def("icosahedral_group", [wrap] { return wrap(designs::icosahedral_group()); });
  m.def("clifford_group", [wrap](int q) { return wrap(designs::clifford_group(q)); }, py::arg("q"));
  m.def("interleaved_4design", [wrap] { return wrap(designs::interleaved_4design()); });

  m.def(
      "verify_design",
      [](const designs::UnitaryEnsemble& e, int t, bool strong, double tol, std::optional<std::int64_t> mc_samples) {
        designs::VerifyOptions o;
        o.strong = strong;
        o.tol = tol;
        o.mc_samples = mc_samples;
        const auto r = designs::verify_strong_design(e, t, o);
        py::dict d;
        d["pass"] = r.pass;
        d["frame_potential"] = r.frame_potential;
        d["haar_frame_potential"] = r.haar_frame_potential;
        py::list res;
        for (const auto& x : r.residuals) res.append(py::make_tuple(x.r, x.s, x.residual));
        d["residuals"] = res;
        return d;
      },
      py::arg("ensemble"), py::arg("t"), py::arg("strong") = true, py::arg("tol") = 1e-10,
      py::arg("mc_samples") = py::none());

  m.def(
      "v2_exact",
      [](const channels::PTM& l, const ComplexMatrix& o_ini, const ComplexMatrix& o_meas, const std::vector<int>& ms) {
        return curve_list(rb::v2_exact(l, o_ini, o_meas, ms, projectors(l.q)));
      },
      py::arg("noise"), py::arg("o_ini"), py::arg("o_meas"), py::arg("lengths"));
  m.def(
      "v1_exact",
      [](const channels::PTM& l, const ComplexMatrix& o_ini, const ComplexMatrix& o_meas, const std::vector<int>& ms) {
        return curve_list(rb::v1_exact(l, o_ini, o_meas, ms));
      },
      py::arg("noise"), py::arg("o_ini"), py::arg("o_meas"), py::arg("lengths"));
  m.def(
      "v_t_monte_carlo",
      [](std::shared_ptr<designs::UnitaryEnsemble> design, int certified_t, const channels::PTM& l, int t,
         const ComplexMatrix& o_ini, const ComplexMatrix& o_meas, const std::vector<int>& ms, long sequences,
         long shots, std::uint64_t seed) {
        rb::RBConfig c;
        c.design = design;
        c.certified_t = certified_t;
        c.noise = l;
        c.t_order = t;
        c.o_ini = o_ini;
        c.o_meas = o_meas;
        c.sequence_lengths = ms;
        c.n_sequences = sequences;
        c.n_shots = shots;
        c.seed = seed;
        fit::DecayCurve curve;
        {
          py::gil_scoped_release release;
          curve = rb::v_t_monte_carlo(c);
        }
        return curve_list(curve);
      },
      py::arg("design"), py::arg("certified_t"), py::arg("noise"), py::arg("t"), py::arg("o_ini"), py::arg("o_meas"),
      py::arg("lengths"), py::arg("sequences"), py::arg("shots") = 0, py::arg("seed") = 1);
}

#include "tdesign/designs.hpp"

#include "tdesign/haar.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <set>

namespace tdesign::designs {

namespace {

void require_unitary(const ComplexMatrix& u, int d, const char* what) {
  if (u.rows() != d || u.cols() != d)
    throw DimensionError(std::string(what) + ": expected " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
  if (!all_finite(u) || !is_unitary(u)) throw DomainError(std::string(what) + ": matrix is not unitary");
}

ComplexMatrix block_diag(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

ComplexMatrix kron_pow(const ComplexMatrix& u, int r) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int i = 0; i < r; ++i) out = kron(out, u);
  return out;
}

ComplexMatrix moment_term(const ComplexMatrix& u, int r, int s) {
  return kron(kron_pow(u, r), kron_pow(u.conjugate(), s));
}

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Elements as contiguous row-major arrays for the pair-sum kernels.
std::vector<cplx> flatten(const std::vector<ComplexMatrix>& els, bool transpose) {
  if (els.empty()) return {};
  const auto d = els.front().rows();
  std::vector<cplx> out(els.size() * static_cast<std::size_t>(d * d));
  std::size_t k = 0;
  for (const auto& u : els)
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) out[k++] = transpose ? u(j, i) : u(i, j);
  return out;
}

}  // namespace

UnitaryEnsemble UnitaryEnsemble::make_explicit(int d, std::vector<ComplexMatrix> elements) {
  if (d < 1) throw DimensionError("ensemble: d must be positive");
  if (elements.empty()) throw DomainError("ensemble: explicit ensemble needs at least one element");
  for (const auto& u : elements) require_unitary(u, d, "ensemble element");
  UnitaryEnsemble e;
  e.d_ = d;
  e.kind_ = Kind::Explicit;
  e.elements_ = std::move(elements);
  return e;
}

UnitaryEnsemble UnitaryEnsemble::make_product(int d, std::vector<Layer> layers) {
  if (layers.empty()) throw DomainError("ensemble: product needs at least one layer");
  for (const auto& layer : layers) {
    if (const auto* m = std::get_if<ComplexMatrix>(&layer)) {
      require_unitary(*m, d, "product layer");
    } else {
      const auto& p = std::get<EnsemblePtr>(layer);
      if (!p || p->d() != d) throw DimensionError("product layer: ensemble dimension mismatch");
    }
  }
  UnitaryEnsemble e;
  e.d_ = d;
  e.kind_ = Kind::Product;
  e.layers_ = std::move(layers);
  return e;
}

UnitaryEnsemble UnitaryEnsemble::make_direct_sum(EnsemblePtr a, EnsemblePtr b) {
  if (!a || !b) throw DomainError("ensemble: direct sum of null ensemble");
  UnitaryEnsemble e;
  e.d_ = a->d() + b->d();
  e.kind_ = Kind::DirectSum;
  e.a_ = std::move(a);
  e.b_ = std::move(b);
  return e;
}

const std::vector<ComplexMatrix>& UnitaryEnsemble::elements() const {
  if (kind_ != Kind::Explicit) throw DomainError("ensemble: elements() requires an explicit ensemble");
  return elements_;
}

const std::vector<Layer>& UnitaryEnsemble::layers() const {
  if (kind_ != Kind::Product) throw DomainError("ensemble: layers() requires a product ensemble");
  return layers_;
}

const EnsemblePtr& UnitaryEnsemble::first() const {
  if (kind_ != Kind::DirectSum) throw DomainError("ensemble: first() requires a direct sum");
  return a_;
}

const EnsemblePtr& UnitaryEnsemble::second() const {
  if (kind_ != Kind::DirectSum) throw DomainError("ensemble: second() requires a direct sum");
  return b_;
}

double UnitaryEnsemble::projected_size() const {
  switch (kind_) {
    case Kind::Explicit:
      return static_cast<double>(elements_.size());
    case Kind::Product: {
      double n = 1.0;
      for (const auto& layer : layers_)
        if (const auto* p = std::get_if<EnsemblePtr>(&layer)) n *= (*p)->projected_size();
      return n;
    }
    case Kind::DirectSum:
      return a_->projected_size() * b_->projected_size();
  }
  return 0.0;
}

ComplexMatrix UnitaryEnsemble::sample(std::mt19937_64& rng) const {
  switch (kind_) {
    case Kind::Explicit: {
      std::uniform_int_distribution<std::size_t> pick(0, elements_.size() - 1);
      return elements_[pick(rng)];
    }
    case Kind::Product: {
      ComplexMatrix u = ComplexMatrix::Identity(d_, d_);
      for (const auto& layer : layers_) {
        if (const auto* m = std::get_if<ComplexMatrix>(&layer)) u = u * *m;
        else u = u * std::get<EnsemblePtr>(layer)->sample(rng);
      }
      return u;
    }
    case Kind::DirectSum: {
      const ComplexMatrix a = a_->sample(rng);
      const ComplexMatrix b = b_->sample(rng);
      return block_diag(a, b);
    }
  }
  return {};
}

UnitaryEnsemble UnitaryEnsemble::expand(std::int64_t cap) const {
  if (projected_size() > static_cast<double>(cap))
    throw DimensionError("ensemble: projected size " + std::to_string(projected_size()) + " exceeds cap " +
                         std::to_string(cap));
  switch (kind_) {
    case Kind::Explicit:
      return *this;
    case Kind::Product: {
      std::vector<ComplexMatrix> acc{ComplexMatrix::Identity(d_, d_)};
      for (const auto& layer : layers_) {
        if (const auto* m = std::get_if<ComplexMatrix>(&layer)) {
          for (auto& u : acc) u = u * *m;
          continue;
        }
        const auto sub = std::get<EnsemblePtr>(layer)->expand(cap);
        std::vector<ComplexMatrix> next;
        next.reserve(acc.size() * sub.elements().size());
        for (const auto& u : acc)
          for (const auto& v : sub.elements()) next.push_back(u * v);
        acc = std::move(next);
      }
      return make_explicit(d_, std::move(acc));
    }
    case Kind::DirectSum: {
      const auto ea = a_->expand(cap);
      const auto eb = b_->expand(cap);
      std::vector<ComplexMatrix> out;
      out.reserve(ea.elements().size() * eb.elements().size());
      for (const auto& u : ea.elements())
        for (const auto& v : eb.elements()) out.push_back(block_diag(u, v));
      return make_explicit(d_, std::move(out));
    }
  }
  return *this;
}

const char* kind_name(UnitaryEnsemble::Kind kind) {
  switch (kind) {
    case UnitaryEnsemble::Kind::Explicit: return "explicit";
    case UnitaryEnsemble::Kind::Product: return "product";
    case UnitaryEnsemble::Kind::DirectSum: return "direct_sum";
  }
  return "?";
}

ComplexMatrix canonical_phase(const ComplexMatrix& u) {
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      const double mag = std::abs(u(i, j));
      if (mag > 1e-6) return u * (std::conj(u(i, j)) / mag);
    }
  return u;
}

namespace {

using PhaseKey = std::vector<long long>;

PhaseKey phase_key(const ComplexMatrix& canonical) {
  constexpr double kScale = 1e8;
  PhaseKey key;
  key.reserve(static_cast<std::size_t>(2 * canonical.size()));
  for (Eigen::Index i = 0; i < canonical.rows(); ++i)
    for (Eigen::Index j = 0; j < canonical.cols(); ++j) {
      key.push_back(std::llround(canonical(i, j).real() * kScale));
      key.push_back(std::llround(canonical(i, j).imag() * kScale));
    }
  return key;
}

}  // namespace

std::vector<ComplexMatrix> dedup_phase(const std::vector<ComplexMatrix>& elements) {
  std::set<PhaseKey> seen;
  std::vector<ComplexMatrix> out;
  for (const auto& u : elements) {
    ComplexMatrix c = canonical_phase(u);
    if (seen.insert(phase_key(c)).second) out.push_back(std::move(c));
  }
  return out;
}

std::vector<ComplexMatrix> group_closure(const std::vector<ComplexMatrix>& generators, std::size_t max_elements) {
  if (generators.empty()) throw DomainError("group_closure: no generators");
  const auto d = generators.front().rows();
  std::set<PhaseKey> seen;
  std::vector<ComplexMatrix> out;
  std::deque<std::size_t> frontier;
  const auto add = [&](const ComplexMatrix& u) {
    ComplexMatrix c = canonical_phase(u);
    if (!seen.insert(phase_key(c)).second) return;
    if (out.size() >= max_elements) throw Error("group_closure: exceeded " + std::to_string(max_elements) + " elements");
    out.push_back(std::move(c));
    frontier.push_back(out.size() - 1);
  };
  add(ComplexMatrix::Identity(d, d));
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop_front();
    for (const auto& g : generators) {
      const ComplexMatrix next = out[i] * g;
      add(next);
    }
  }
  return out;
}

UnitaryEnsemble w1(int t) {
  if (t < 1) throw DomainError("w1: t must be at least 1");
  std::vector<ComplexMatrix> els;
  for (int k = 0; k <= t; ++k) {
    ComplexMatrix z(1, 1);
    z(0, 0) = std::polar(1.0, 2.0 * std::numbers::pi * k / (t + 1));
    els.push_back(z);
  }
  return UnitaryEnsemble::make_explicit(1, std::move(els));
}

UnitaryEnsemble direct_sum_ensemble(const UnitaryEnsemble& a, const UnitaryEnsemble& b) {
  const auto pa = std::make_shared<const UnitaryEnsemble>(a);
  const auto pb = std::make_shared<const UnitaryEnsemble>(b);
  const auto sum = UnitaryEnsemble::make_direct_sum(pa, pb);
  if (a.kind() == UnitaryEnsemble::Kind::Explicit && b.kind() == UnitaryEnsemble::Kind::Explicit)
    return sum.expand(UnitaryEnsemble::kDefaultExplicitCap);
  return sum;
}

ComplexMatrix rotation_unitary(const std::vector<double>& thetas, int d1, int d) {
  if (static_cast<int>(thetas.size()) != d1 || d1 < 1 || 2 * d1 > d)
    throw DimensionError("rotation_unitary: need length(thetas) = d1 and 2 d1 <= d");
  ComplexMatrix r = ComplexMatrix::Identity(d, d);
  for (int j = 0; j < d1; ++j) {
    const double c = std::cos(thetas[static_cast<std::size_t>(j)]);
    const double s = std::sin(thetas[static_cast<std::size_t>(j)]);
    r(j, j) = c;
    r(d1 + j, d1 + j) = c;
    r(j, d1 + j) = cplx(0.0, s);
    r(d1 + j, j) = cplx(0.0, s);
  }
  return r;
}

namespace {

EnsemblePtr qudit_design_ptr(int d, int t, std::int64_t cap) {
  if (d == 1) return std::make_shared<const UnitaryEnsemble>(w1(t));
  const auto base = std::make_shared<const UnitaryEnsemble>(
      UnitaryEnsemble::make_direct_sum(qudit_design_ptr(1, t, cap), qudit_design_ptr(d - 1, t, cap)));
  std::vector<Layer> layers{base};
  for (const auto& label : zonal::enumerate_sph_labels(1, d, t)) {
    const auto angles = zonal::find_angles(label);
    layers.emplace_back(rotation_unitary(angles.thetas, 1, d));
    layers.emplace_back(base);
  }
  auto product = UnitaryEnsemble::make_product(d, std::move(layers));
  if (product.projected_size() <= static_cast<double>(cap))
    return std::make_shared<const UnitaryEnsemble>(product.expand(cap));
  return std::make_shared<const UnitaryEnsemble>(std::move(product));
}

}  // namespace

UnitaryEnsemble build_qudit_design(int d, int t, std::int64_t cap) {
  if (d < 2) throw DomainError("build_qudit_design: d must be at least 2");
  if (t < 1) throw DomainError("build_qudit_design: t must be at least 1");
  return *qudit_design_ptr(d, t, cap);
}

std::size_t CircuitDescriptor::rotation_count() const {
  return static_cast<std::size_t>(std::count_if(layers.begin(), layers.end(), [](const CircuitLayer& l) {
    return l.kind == CircuitLayer::Kind::ControlledXRotation;
  }));
}

std::size_t CircuitDescriptor::design_layer_count() const { return layers.size() - rotation_count(); }

CircuitDescriptor build_qubit_circuit_descriptor(int n_plus_1, int t, const std::vector<AngleTable>& tables) {
  if (n_plus_1 < 1 || n_plus_1 > 10) throw DomainError("circuit descriptor: qubit count must be in [1, 10]");
  if (t < 1) throw DomainError("circuit descriptor: t must be at least 1");
  CircuitDescriptor desc;
  desc.n_qubits = n_plus_1;
  desc.t = t;
  if (n_plus_1 == 1) return desc;

  desc.inner = std::make_shared<const CircuitDescriptor>(build_qubit_circuit_descriptor(n_plus_1 - 1, t, tables));
  const int dim_half = 1 << (n_plus_1 - 1);
  const std::size_t level = static_cast<std::size_t>(n_plus_1 - 2);
  if (level >= tables.size())
    throw DomainError("circuit descriptor: no angle table for " + std::to_string(n_plus_1) + " qubits");
  const AngleTable& table = tables[level];
  desc.layers.push_back({CircuitLayer::Kind::ControlledDesign, {}, {}});
  for (const auto& label : zonal::enumerate_sph_labels(dim_half, 2 * dim_half, t)) {
    const auto it = table.find(label.positive_part);
    if (it == table.end()) {
      std::string name;
      for (int p : label.positive_part) name += (name.empty() ? "" : ",") + std::to_string(p);
      throw DomainError("circuit descriptor: missing angles for label (" + name + ")");
    }
    if (static_cast<int>(it->second.size()) != dim_half)
      throw DimensionError("circuit descriptor: angle vector must have length " + std::to_string(dim_half));
    desc.layers.push_back({CircuitLayer::Kind::ControlledXRotation, label.positive_part, it->second});
    desc.layers.push_back({CircuitLayer::Kind::ControlledDesign, {}, {}});
  }
  return desc;
}

UnitaryEnsemble descriptor_ensemble(const CircuitDescriptor& desc) {
  constexpr std::int64_t kBaseCap = 100'000;
  if (!desc.inner) return build_qudit_design(2, desc.t, kBaseCap);
  const auto q = std::make_shared<const UnitaryEnsemble>(descriptor_ensemble(*desc.inner));
  const auto ctrl_q = std::make_shared<const UnitaryEnsemble>(UnitaryEnsemble::make_direct_sum(q, q));
  const int dim_half = q->d();
  std::vector<Layer> layers;
  for (const auto& layer : desc.layers) {
    if (layer.kind == CircuitLayer::Kind::ControlledDesign) layers.emplace_back(ctrl_q);
    else layers.emplace_back(rotation_unitary(layer.thetas, dim_half, 2 * dim_half));
  }
  return UnitaryEnsemble::make_product(2 * dim_half, std::move(layers));
}

namespace {

ComplexMatrix hadamard() {
  ComplexMatrix h(2, 2);
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

ComplexMatrix phase_gate() {
  ComplexMatrix s(2, 2);
  s << 1, 0, 0, cplx(0, 1);
  return s;
}

}  // namespace

UnitaryEnsemble icosahedral_group() {
  // Rotations by 2 pi / 5 about a five-fold axis (z) and an adjacent one at
  // angle arccos(1/sqrt 5); cos(pi/5) = phi/2.
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double c = phi / 2.0;
  const double s = std::sqrt(1.0 - c * c);
  ComplexMatrix g1(2, 2), g2(2, 2);
  g1 << cplx(c, -s), 0, 0, cplx(c, s);
  const double nx = 2.0 / std::sqrt(5.0), nz = 1.0 / std::sqrt(5.0);
  g2 = c * pauli_i() - cplx(0.0, s) * (nx * pauli_x() + nz * pauli_z());
  auto els = group_closure({g1, g2}, 10'000);
  if (els.size() != 60) throw Error("icosahedral_group: closure produced " + std::to_string(els.size()) + " elements");
  return UnitaryEnsemble::make_explicit(2, std::move(els));
}

UnitaryEnsemble clifford_group(int q) {
  const ComplexMatrix h = hadamard(), s = phase_gate(), id = pauli_i();
  std::vector<ComplexMatrix> gens;
  std::size_t expected = 0;
  if (q == 1) {
    gens = {h, s};
    expected = 24;
  } else if (q == 2) {
    ComplexMatrix cnot = ComplexMatrix::Zero(4, 4);
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
    gens = {kron(h, id), kron(id, h), kron(s, id), kron(id, s), cnot};
    expected = 11520;
  } else {
    throw DomainError("clifford_group: only q = 1 or q = 2 is supported");
  }
  auto els = group_closure(gens, 20'000);
  if (els.size() != expected) throw Error("clifford_group: closure produced " + std::to_string(els.size()) + " elements");
  return UnitaryEnsemble::make_explicit(1 << q, std::move(els));
}

namespace {

ComplexMatrix rot(double theta, const ComplexMatrix& w) { return matexp(ComplexMatrix(cplx(0.0, theta) * w)); }

ComplexMatrix r1(double a, double b, double c) {
  return rot(a, pauli_z()) * rot(b, pauli_y()) * rot(c, pauli_z());
}

}  // namespace

ComplexMatrix uc_unitary() {
  const ComplexMatrix xx = kron(pauli_x(), pauli_x());
  const ComplexMatrix yy = kron(pauli_y(), pauli_y());
  const ComplexMatrix zz = kron(pauli_z(), pauli_z());
  const ComplexMatrix r2 = matexp(ComplexMatrix(cplx(0.0, -1.0) * (0.376407 * xx + 0.368786 * yy + 3.69014 * zz)));
  const ComplexMatrix left = kron(r1(1.50097, 5.69898, 2.53181), r1(1.25383, 0.01700, 6.21127));
  const ComplexMatrix right = kron(r1(4.66335, 3.04854, 1.45524), r1(0.337423, 3.38137, 3.82503));
  return left * r2 * right;
}

UnitaryEnsemble interleaved_4design() {
  const auto c2 = std::make_shared<const UnitaryEnsemble>(clifford_group(2));
  return UnitaryEnsemble::make_product(4, {c2, uc_unitary(), c2});
}

namespace {

struct PairSumRequest {
  int r;
  int s;
};

// (1/N^2) sum_{U,V} z^r conj(z)^s with z = tr(U^dag V), for each request.
std::vector<cplx> pair_power_sums(const std::vector<ComplexMatrix>& els, const std::vector<PairSumRequest>& req) {
  const std::size_t n = els.size();
  const auto d = static_cast<std::size_t>(els.front().rows());
  const std::size_t dd = d * d;
  const auto flat = flatten(els, false);
  using Acc = std::vector<cplx>;
  struct Sum {
    Acc v;
    Sum& operator+=(const Sum& o) {
      if (v.empty()) v.assign(o.v.size(), 0.0);
      for (std::size_t i = 0; i < o.v.size(); ++i) v[i] += o.v[i];
      return *this;
    }
  };
  const Sum total = chunked_sum(
      n, Sum{Acc(req.size(), 0.0)},
      [&](std::size_t begin, std::size_t end, Sum& acc) {
        for (std::size_t a = begin; a < end; ++a) {
          const cplx* ua = flat.data() + a * dd;
          for (std::size_t b = 0; b < n; ++b) {
            const cplx* vb = flat.data() + b * dd;
            cplx z = 0.0;
            for (std::size_t k = 0; k < dd; ++k) z += std::conj(ua[k]) * vb[k];
            for (std::size_t i = 0; i < req.size(); ++i)
              acc.v[i] += std::pow(z, req[i].r) * std::pow(std::conj(z), req[i].s);
          }
        }
      },
      8);
  const double norm = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  std::vector<cplx> out(req.size());
  for (std::size_t i = 0; i < req.size(); ++i) out[i] = total.v[i] * norm;
  return out;
}

ComplexMatrix explicit_moment(const std::vector<ComplexMatrix>& els, int r, int s, std::int64_t dim) {
  const ComplexMatrix zero = ComplexMatrix::Zero(dim, dim);
  const ComplexMatrix sum = chunked_sum(els.size(), zero, [&](std::size_t begin, std::size_t end, ComplexMatrix& acc) {
    for (std::size_t i = begin; i < end; ++i) acc += moment_term(els[i], r, s);
  });
  return sum / static_cast<double>(els.size());
}

ComplexMatrix haar_moment_dense(int d, int r, int s, std::int64_t dim) {
  if (r != s) return ComplexMatrix::Zero(dim, dim);
  if (r == 0) return ComplexMatrix::Ones(1, 1);
  return haar::haar_moment_projector(d, r).matrix(dim);
}

}  // namespace

DesignReport verify_strong_design(const UnitaryEnsemble& e, int t, const VerifyOptions& opts) {
  if (t < 1) throw DomainError("verify_strong_design: t must be at least 1");
  const int d = e.d();
  DesignReport report;
  report.t_checked = t;
  report.strong = opts.strong;
  report.tolerance = opts.tol;
  report.haar_frame_potential = static_cast<double>(haar::haar_frame_potential(d, t));

  std::vector<PairSumRequest> pairs;
  for (int r = 0; r <= t; ++r)
    for (int s = 0; s <= t; ++s) {
      if (r + s == 0) continue;
      if (!opts.strong && r != s) continue;
      pairs.push_back({r, s});
    }

  const bool is_explicit = e.kind() == UnitaryEnsemble::Kind::Explicit;
  if (!is_explicit && !opts.mc_samples)
    throw DimensionError("verify_strong_design: sampler ensembles require mc_samples");

  if (is_explicit) {
    const auto& els = e.elements();
    std::vector<PairSumRequest> via_pairs;
    for (const auto& [r, s] : pairs) {
      const std::int64_t dim = ipow(d, r + s);
      if (dim > opts.dense_limit) {
        via_pairs.push_back({r, s});
        continue;
      }
      const ComplexMatrix m = explicit_moment(els, r, s, dim);
      report.residuals.push_back({r, s, (m - haar_moment_dense(d, r, s, dim)).norm(), 0.0, "dense"});
    }
    if (!via_pairs.empty()) {
      if (static_cast<double>(els.size()) * static_cast<double>(els.size()) > 1e9)
        throw DimensionError("verify_strong_design: pair sum over more than 1e9 pairs");
      const auto sums = pair_power_sums(els, via_pairs);
      for (std::size_t i = 0; i < via_pairs.size(); ++i) {
        const auto [r, s] = via_pairs[i];
        // ||E - M||^2 = FP - rank for r = s; the Haar value is 0 otherwise.
        const double sq = r == s ? sums[i].real() - static_cast<double>(haar::haar_frame_potential(d, r))
                                 : std::abs(sums[i]);
        report.residuals.push_back({r, s, std::sqrt(std::max(0.0, sq)), 0.0, "frame-potential"});
      }
    }
    if (opts.compute_frame_potential && static_cast<double>(els.size()) * els.size() <= 1e9)
      report.frame_potential = frame_potential(e, t).value;
  } else {
    const std::int64_t n = *opts.mc_samples;
    if (n < 2) throw DomainError("verify_strong_design: need at least two samples");
    std::mt19937_64 rng(opts.seed);
    std::vector<ComplexMatrix> samples;
    samples.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) samples.push_back(e.sample(rng));
    for (const auto& [r, s] : pairs) {
      const std::int64_t dim = ipow(d, r + s);
      if (dim > opts.dense_limit) throw DimensionError("verify_strong_design: Monte Carlo moment exceeds dense limit");
      ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
      RealMatrix sum_sq = RealMatrix::Zero(dim, dim);
      for (const auto& u : samples) {
        const ComplexMatrix term = moment_term(u, r, s);
        sum += term;
        sum_sq += term.cwiseAbs2();
      }
      const double nn = static_cast<double>(n);
      const ComplexMatrix mean = sum / nn;
      const RealMatrix var = ((sum_sq / nn - mean.cwiseAbs2()) * (nn / (nn - 1.0))).cwiseMax(0.0);
      const double floor = std::sqrt(var.sum() / nn);
      report.residuals.push_back({r, s, (mean - haar_moment_dense(d, r, s, dim)).norm(), floor, "monte-carlo"});
    }
  }

  report.pass = std::all_of(report.residuals.begin(), report.residuals.end(), [&](const MomentResidual& m) {
    return m.method == "monte-carlo" ? m.residual < 3.0 * m.std_error : m.residual < opts.tol;
  });
  return report;
}

double interleaved_frame_potential(const std::vector<ComplexMatrix>& group, const ComplexMatrix& uc, int t) {
  if (group.empty()) throw DomainError("interleaved_frame_potential: empty group");
  const auto d = static_cast<std::size_t>(uc.rows());
  const std::size_t dd = d * d;
  std::vector<ComplexMatrix> conj;
  conj.reserve(group.size());
  for (const auto& c : group) conj.push_back(uc.adjoint() * c * uc);
  const auto a_flat = flatten(conj, false);
  const auto c_flat_t = flatten(group, true);
  const std::size_t n = group.size();
  const double total = chunked_sum(
      n, 0.0,
      [&](std::size_t begin, std::size_t end, double& acc) {
        for (std::size_t i = begin; i < end; ++i) {
          const cplx* a = a_flat.data() + i * dd;
          double row = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            const cplx* c = c_flat_t.data() + j * dd;
            cplx z = 0.0;
            for (std::size_t k = 0; k < dd; ++k) z += a[k] * c[k];  // tr(A C') = sum_ik A_ik C'_ki
            row += std::pow(std::norm(z), t);
          }
          acc += row;
        }
      },
      8);
  return total / (static_cast<double>(n) * static_cast<double>(n));
}

Estimate frame_potential(const UnitaryEnsemble& e, int t, const FramePotentialOptions& opts) {
  if (t < 1) throw DomainError("frame_potential: t must be at least 1");
  switch (opts.mode) {
    case FrameMode::ExactPairs: {
      if (e.kind() != UnitaryEnsemble::Kind::Explicit)
        throw DomainError("frame_potential: exact pairs need an explicit ensemble");
      const auto& els = e.elements();
      if (static_cast<double>(els.size()) * static_cast<double>(els.size()) > 1e9)
        throw DimensionError("frame_potential: more than 1e9 pairs");
      return {pair_power_sums(els, {{t, t}})[0].real(), 0.0};
    }
    case FrameMode::InterleavedReduced: {
      if (e.kind() != UnitaryEnsemble::Kind::Product || e.layers().size() != 3)
        throw DomainError("frame_potential: interleaved mode needs a product C . U_c . C");
      const auto& ls = e.layers();
      const auto* outer1 = std::get_if<EnsemblePtr>(&ls[0]);
      const auto* middle = std::get_if<ComplexMatrix>(&ls[1]);
      const auto* outer2 = std::get_if<EnsemblePtr>(&ls[2]);
      const auto same_outer = [&] {
        if (*outer1 == *outer2) return true;
        if ((*outer2)->kind() != UnitaryEnsemble::Kind::Explicit) return false;
        const auto& a = (*outer1)->elements();
        const auto& b = (*outer2)->elements();
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
          if ((a[i] - b[i]).norm() > 1e-12) return false;
        return true;
      };
      if (!outer1 || !middle || !outer2 || (*outer1)->kind() != UnitaryEnsemble::Kind::Explicit || !same_outer())
        throw DomainError("frame_potential: interleaved mode needs identical explicit outer layers");
      return {interleaved_frame_potential((*outer1)->elements(), *middle, t), 0.0};
    }
    case FrameMode::MonteCarlo: {
      if (opts.mc_samples < 2) throw DomainError("frame_potential: need at least two samples");
      std::mt19937_64 rng(opts.seed);
      double sum = 0.0, sum_sq = 0.0;
      for (std::int64_t i = 0; i < opts.mc_samples; ++i) {
        const ComplexMatrix u = e.sample(rng);
        const ComplexMatrix v = e.sample(rng);
        const double x = std::pow(std::norm((u.adjoint() * v).trace()), t);
        sum += x;
        sum_sq += x * x;
      }
      const double n = static_cast<double>(opts.mc_samples);
      const double mean = sum / n;
      const double var = std::max(0.0, (sum_sq / n - mean * mean) * n / (n - 1.0));
      return {mean, std::sqrt(var / n)};
    }
  }
  return {};
}

}  // namespace tdesign::designs

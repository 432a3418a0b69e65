#include "qchsh/channels.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace qchsh {

std::string_view family_code(ChannelFamily family) {
  switch (family) {
    case ChannelFamily::Depolarizing:
      return "dep";
    case ChannelFamily::AmplitudeDamping:
      return "ad";
    case ChannelFamily::Loss:
      return "loss";
    case ChannelFamily::Erasure:
      return "er";
  }
  throw parameter_error("unknown channel family");
}

ChannelFamily family_from_code(std::string_view code) {
  if (code == "dep") return ChannelFamily::Depolarizing;
  if (code == "ad") return ChannelFamily::AmplitudeDamping;
  if (code == "loss") return ChannelFamily::Loss;
  if (code == "er") return ChannelFamily::Erasure;
  throw parameter_error("unknown channel family code: " + std::string(code));
}

ChannelParam make_param(ChannelFamily family, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw parameter_error("channel parameter p must be in [0, 1]");
  return ChannelParam{family, p};
}

ChannelParam parse_channel_spec(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 >= spec.size())
    throw parameter_error("channel spec must look like family:p, got: " + std::string(spec));
  const ChannelFamily family = family_from_code(spec.substr(0, colon));
  const std::string_view num = spec.substr(colon + 1);
  double p = 0.0;
  const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), p);
  if (ec != std::errc{} || ptr != num.data() + num.size())
    throw parameter_error("channel spec has a malformed parameter: " + std::string(spec));
  return make_param(family, p);
}

std::string spec_string(const ChannelParam& param) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), param.p);
  return std::string(family_code(param.family)) + ":" + std::string(buf, res.ptr);
}

KrausChannel::KrausChannel(std::size_t in_dim, std::size_t out_dim,
                           std::vector<ComplexMatrix> ops, std::string label, double tol)
    : in_dim_(in_dim), out_dim_(out_dim), ops_(std::move(ops)), label_(std::move(label)) {
  if (ops_.empty()) throw parameter_error("channel needs at least one Kraus operator");
  for (const auto& e : ops_) {
    if (e.rows() != out_dim_ || e.cols() != in_dim_)
      throw dimension_error("Kraus operator shape does not match channel dimensions");
  }
  // Trace preservation: sum E^H E = I.
  ComplexMatrix sum(in_dim_, in_dim_);
  for (const auto& e : ops_) sum += e.adjoint() * e;
  if (!sum.approx_equal(ComplexMatrix::identity(in_dim_), tol))
    throw contract_error("Kraus operators are not trace-preserving: " + label_);
  // Complete positivity: the Choi matrix of any Kraus-sum map is PSD by
  // construction, but verify numerically to catch bad arithmetic upstream.
  const EigResult eig = hermitian_eig(choi(), 1e-8);
  if (eig.values.back() < kChoiEigFloor)
    throw contract_error("Choi matrix has a negative eigenvalue: " + label_);
}

ComplexMatrix KrausChannel::choi() const {
  // sum_k |v_k><v_k| with v_k = (I (x) E_k) sum_i |i,i>.
  ComplexMatrix c(in_dim_ * out_dim_, in_dim_ * out_dim_);
  for (const auto& e : ops_) {
    std::vector<cplx> v(in_dim_ * out_dim_);
    for (std::size_t i = 0; i < in_dim_; ++i)
      for (std::size_t o = 0; o < out_dim_; ++o) v[i * out_dim_ + o] = e(o, i);
    c += outer(v, v);
  }
  return c;
}

KrausChannel make_depolarizing(double p) {
  make_param(ChannelFamily::Depolarizing, p);
  std::vector<ComplexMatrix> ops;
  ops.push_back(cplx{std::sqrt((1.0 + 3.0 * p) / 4.0), 0.0} * ComplexMatrix::identity(2));
  for (std::size_t i = 1; i <= 3; ++i)
    ops.push_back(cplx{std::sqrt((1.0 - p) / 4.0), 0.0} * pauli(i));
  return KrausChannel(2, 2, std::move(ops), "dep:" + std::to_string(p));
}

KrausChannel make_amplitude_damping(double p) {
  make_param(ChannelFamily::AmplitudeDamping, p);
  ComplexMatrix e1{{1.0, 0.0}, {0.0, std::sqrt(p)}};
  ComplexMatrix e2{{0.0, std::sqrt(1.0 - p)}, {0.0, 0.0}};
  std::vector<ComplexMatrix> ops{e1, e2};
  return KrausChannel(2, 2, std::move(ops), "ad:" + std::to_string(p));
}

KrausChannel make_loss(double p) {
  make_param(ChannelFamily::Loss, p);
  // Transmit with probability p, otherwise discard and emit |0>. The
  // replacement part has Kraus pieces |0><0| and |0><1|.
  std::vector<ComplexMatrix> ops;
  ops.push_back(cplx{std::sqrt(p), 0.0} * ComplexMatrix::identity(2));
  const double r = std::sqrt(1.0 - p);
  ops.push_back(ComplexMatrix{{r, 0.0}, {0.0, 0.0}});
  ops.push_back(ComplexMatrix{{0.0, r}, {0.0, 0.0}});
  return KrausChannel(2, 2, std::move(ops), "loss:" + std::to_string(p));
}

KrausChannel make_erasure(double p) {
  make_param(ChannelFamily::Erasure, p);
  const double r = std::sqrt(1.0 - p);
  const double s = std::sqrt(p);
  // Output basis (|0>, |1>, |e>): identity embedding plus flag transitions.
  ComplexMatrix e1(3, 2);
  e1(0, 0) = s;
  e1(1, 1) = s;
  ComplexMatrix e2(3, 2);
  e2(2, 0) = r;
  ComplexMatrix e3(3, 2);
  e3(2, 1) = r;
  std::vector<ComplexMatrix> ops{e1, e2, e3};
  return KrausChannel(2, 3, std::move(ops), "er:" + std::to_string(p));
}

KrausChannel make_identity(std::size_t dim) {
  std::vector<ComplexMatrix> ops{ComplexMatrix::identity(dim)};
  return KrausChannel(dim, dim, std::move(ops), "id:" + std::to_string(dim));
}

KrausChannel make_channel(const ChannelParam& param) {
  switch (param.family) {
    case ChannelFamily::Depolarizing:
      return make_depolarizing(param.p);
    case ChannelFamily::AmplitudeDamping:
      return make_amplitude_damping(param.p);
    case ChannelFamily::Loss:
      return make_loss(param.p);
    case ChannelFamily::Erasure:
      return make_erasure(param.p);
  }
  throw parameter_error("unknown channel family");
}

ComplexMatrix apply_raw(const KrausChannel& ch, const ComplexMatrix& m,
                        const std::vector<std::size_t>& dims, std::size_t target) {
  if (target >= dims.size()) throw dimension_error("channel target out of range");
  if (dims[target] != ch.in_dim())
    throw dimension_error("channel input dimension does not match target factor");
  std::vector<std::size_t> out_dims = dims;
  out_dims[target] = ch.out_dim();
  const std::size_t dout = product_dim(out_dims);
  ComplexMatrix acc(dout, dout);
  for (const auto& e : ch.kraus()) {
    const ComplexMatrix lifted = lift_to_subsystem(e, dims, target);
    acc += lifted * m * lifted.adjoint();
  }
  return acc;
}

DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho, std::size_t target) {
  ComplexMatrix out = apply_raw(ch, rho.matrix(), rho.dims(), target);
  std::vector<std::size_t> out_dims = rho.dims();
  out_dims[target] = ch.out_dim();
  return DensityMatrix::trusted(std::move(out_dims), std::move(out));
}

ComplexMatrix adjoint_apply(const KrausChannel& ch, const ComplexMatrix& obs,
                            const std::vector<std::size_t>& dims, std::size_t target) {
  if (target >= dims.size()) throw dimension_error("channel target out of range");
  if (dims[target] != ch.out_dim())
    throw dimension_error("adjoint target factor must carry the channel output dimension");
  std::vector<std::size_t> in_dims = dims;
  in_dims[target] = ch.in_dim();
  const std::size_t din = product_dim(in_dims);
  ComplexMatrix acc(din, din);
  for (const auto& e : ch.kraus()) {
    const ComplexMatrix lifted = lift_to_subsystem(e, in_dims, target);
    acc += lifted.adjoint() * obs * lifted;
  }
  return acc;
}

AffineRep affine_rep(const KrausChannel& ch) {
  if (ch.in_dim() != 2 || ch.out_dim() != 2)
    throw dimension_error("affine representation is defined for qubit-to-qubit channels");
  AffineRep rep{};
  const std::vector<std::size_t> dims{2};
  const ComplexMatrix half_id = cplx{0.5, 0.0} * ComplexMatrix::identity(2);
  const ComplexMatrix img_id = apply_raw(ch, half_id, dims, 0);
  for (std::size_t i = 1; i <= 3; ++i)
    rep.shift[i - 1] = (pauli(i) * img_id).trace().real();
  for (std::size_t j = 1; j <= 3; ++j) {
    const ComplexMatrix img = apply_raw(ch, cplx{0.5, 0.0} * pauli(j), dims, 0);
    for (std::size_t i = 1; i <= 3; ++i)
      rep.lambda[i - 1][j - 1] = (pauli(i) * img).trace().real();
  }
  return rep;
}

DensityMatrix affine_apply(const AffineRep& rep, const DensityMatrix& rho) {
  if (rho.total_dim() != 2) throw dimension_error("affine_apply expects a qubit state");
  const std::array<double, 3> v = bloch_vector(rho.matrix());
  std::array<double, 3> w{};
  for (std::size_t i = 0; i < 3; ++i) {
    w[i] = rep.shift[i];
    for (std::size_t j = 0; j < 3; ++j) w[i] += rep.lambda[i][j] * v[j];
  }
  return DensityMatrix::trusted({2}, qubit_from_bloch(w));
}

bool is_unital(const KrausChannel& ch, double tol) {
  if (!ch.is_square()) return false;
  const std::size_t d = ch.in_dim();
  ComplexMatrix sum(d, d);
  for (const auto& e : ch.kraus()) sum += e * e.adjoint();
  return sum.approx_equal(ComplexMatrix::identity(d), tol);
}

bool is_entanglement_breaking_qubit(const KrausChannel& ch) {
  if (ch.in_dim() != 2 || ch.out_dim() != 2)
    throw dimension_error("entanglement-breaking test implemented for qubit channels");
  const ComplexMatrix c = ch.choi();
  // Partial transpose on the input copy: swap the block row/column indices.
  ComplexMatrix pt(4, 4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t o = 0; o < 2; ++o)
      for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t q = 0; q < 2; ++q)
          pt(i * 2 + o, j * 2 + q) = c(j * 2 + o, i * 2 + q);
  const EigResult eig = hermitian_eig(pt, 1e-8);
  return eig.values.back() >= kChoiEigFloor;
}

bool channels_approx_equal(const KrausChannel& a, const KrausChannel& b, double tol) {
  if (a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim()) return false;
  return a.choi().approx_equal(b.choi(), tol);
}

KrausChannel random_unital_qubit_channel(Rng& rng) {
  // Dirichlet-ish mixing weights over the four Pauli conjugations.
  std::array<double, 4> w{};
  double total = 0.0;
  for (auto& x : w) {
    x = -std::log(std::max(rng.uniform(), 1e-300));
    total += x;
  }
  const ComplexMatrix u = random_unitary(2, rng);
  const ComplexMatrix v = random_unitary(2, rng);
  std::vector<ComplexMatrix> ops;
  for (std::size_t i = 0; i < 4; ++i)
    ops.push_back(cplx{std::sqrt(w[i] / total), 0.0} * (v * pauli(i) * u));
  return KrausChannel(2, 2, std::move(ops), "random-unital");
}

}  // namespace qchsh

#include "qchsh/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "qchsh/chsh.hpp"
#include "qchsh/types.hpp"

namespace qchsh {

std::string_view kind_code(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::SingleChannel:
      return "single_channel";
    case ProtocolKind::Unidirectional:
      return "unidirectional";
    case ProtocolKind::Bidirectional:
      return "bidirectional";
  }
  throw parameter_error("unknown protocol kind");
}

ProtocolKind kind_from_code(std::string_view code) {
  if (code == "single_channel" || code == "single") return ProtocolKind::SingleChannel;
  if (code == "unidirectional" || code == "uni") return ProtocolKind::Unidirectional;
  if (code == "bidirectional" || code == "bi") return ProtocolKind::Bidirectional;
  throw parameter_error("unknown protocol kind '" + std::string(code) + "'");
}

ProtocolDescriptor make_descriptor(ProtocolKind kind, const ChannelParam& channel1,
                                   std::optional<ChannelParam> channel2, bool symmetric_pair) {
  ProtocolDescriptor d;
  d.kind = kind;
  d.channel1 = channel1;
  if (kind == ProtocolKind::SingleChannel) {
    if (channel2) throw parameter_error("single-channel protocol takes no second channel");
    if (symmetric_pair) throw parameter_error("symmetric pair needs the bidirectional protocol");
    d.cut_permutation = {0, 1};
    return d;
  }
  if (symmetric_pair) {
    if (kind != ProtocolKind::Bidirectional)
      throw parameter_error("symmetric pair needs the bidirectional protocol");
    if (channel2 && (channel2->family != channel1.family || channel2->p != channel1.p))
      throw parameter_error("symmetric pair uses the same channel on both factors");
    channel2 = channel1;
  }
  if (!channel2) throw parameter_error("two-channel protocol needs a second channel");
  d.channel2 = channel2;
  d.cut_permutation = {0, 2, 1, 3};
  d.symmetric_pair = symmetric_pair;
  return d;
}

DensityMatrix unidirectional_output(const KrausChannel& ch1, const KrausChannel& ch2,
                                    const DensityMatrix& rho) {
  if (rho.dims() != std::vector<std::size_t>({2, 2, 2, 2}))
    throw dimension_error("unidirectional input is a four-qubit state");
  if (ch1.in_dim() != 2 || ch2.in_dim() != 2)
    throw dimension_error("unidirectional channels accept qubits");
  ComplexMatrix out = apply_raw(ch1, rho.matrix(), {2, 2, 2, 2}, 1);
  out = apply_raw(ch2, out, {2, ch1.out_dim(), 2, 2}, 3);
  return DensityMatrix({2, ch1.out_dim(), 2, ch2.out_dim()}, std::move(out));
}

DensityMatrix bidirectional_output(const KrausChannel& ch1, const KrausChannel& ch2,
                                   const DensityMatrix& rho1, const DensityMatrix& rho2) {
  const std::vector<std::size_t> pair{2, 2};
  if (rho1.dims() != pair || rho2.dims() != pair)
    throw dimension_error("bidirectional inputs are two-qubit states");
  if (ch1.in_dim() != 2 || ch2.in_dim() != 2)
    throw dimension_error("bidirectional channels accept qubits");
  const ComplexMatrix o1 = apply_raw(ch1, rho1.matrix(), {2, 2}, 1);
  const ComplexMatrix o2 = apply_raw(ch2, rho2.matrix(), {2, 2}, 0);
  return DensityMatrix({2, ch1.out_dim(), ch2.out_dim(), 2}, tensor_product(o1, o2));
}

bool verify_breaking(const ChannelParam& param) {
  constexpr double slack = 1e-9;
  switch (param.family) {
    case ChannelFamily::Depolarizing:
      return unital_is_chsh_breaking(affine_rep(make_channel(param)));
    case ChannelFamily::AmplitudeDamping:
      return param.p <= amplitude_damping_threshold() + slack;
    case ChannelFamily::Loss:
      return param.p <= loss_threshold() + slack;
    case ChannelFamily::Erasure:
      return param.p <= erasure_threshold() + slack;
  }
  throw parameter_error("unknown channel family");
}

double breaking_threshold(ChannelFamily family) {
  switch (family) {
    case ChannelFamily::Depolarizing:
      return 1.0 / std::sqrt(2.0);
    case ChannelFamily::AmplitudeDamping:
      return amplitude_damping_threshold();
    case ChannelFamily::Loss:
      return loss_threshold();
    case ChannelFamily::Erasure:
      return erasure_threshold();
  }
  throw parameter_error("unknown channel family");
}

double single_channel_max_value(const ChannelParam& param, const SeesawConfig& config) {
  const ProtocolDescriptor proto = make_descriptor(ProtocolKind::SingleChannel, param);
  return run_seesaw(proto, make_channel(param), make_identity(2), config).best_value;
}

ActivationResult activation_search(const ProtocolDescriptor& descriptor,
                                   const SeesawConfig& config) {
  const KrausChannel ch1 = make_channel(descriptor.channel1);
  const KrausChannel ch2 =
      descriptor.channel2 ? make_channel(*descriptor.channel2) : make_identity(2);
  ActivationResult out;
  out.descriptor = descriptor;
  out.seesaw = run_seesaw(descriptor, ch1, ch2, config);
  out.channel1_breaking = verify_breaking(descriptor.channel1);
  out.channel2_breaking = descriptor.channel2 ? verify_breaking(*descriptor.channel2) : true;
  out.activated =
      out.seesaw.best_value > 2.0 + 1e-4 && out.channel1_breaking && out.channel2_breaking;
  return out;
}

ThresholdCrossing threshold_crossing(ChannelFamily family, const SeesawConfig& config) {
  const double nominal = breaking_threshold(family);
  double lo = nominal - 0.03;
  double hi = nominal + 0.04;
  int probe = 0;
  const auto violated = [&](double p) {
    SeesawConfig c = config;
    c.seed = config.seed + static_cast<std::uint64_t>(probe++) * 1000003ULL;
    return single_channel_max_value(make_param(family, p), c) > 2.0 + 1e-4;
  };
  if (violated(lo)) throw numeric_error("lower bisection bracket already violates CHSH");
  if (!violated(hi)) throw numeric_error("upper bisection bracket shows no violation");
  while (hi - lo > 0.004) {
    const double mid = 0.5 * (lo + hi);
    if (violated(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {family, lo, hi, 0.5 * (lo + hi), nominal};
}

SweepResult robustness_sweep(ProtocolKind kind, ChannelFamily family1, ChannelFamily family2,
                             double p1_lo, double p1_hi, double p2_lo, double p2_hi, double step,
                             const SeesawConfig& config) {
  if (kind == ProtocolKind::SingleChannel)
    throw parameter_error("sweep needs a two-channel protocol");
  if (!(step > 0.0)) throw parameter_error("sweep step must be positive");
  const auto grid = [step](double lo, double hi) {
    if (lo < 0.0 || hi > 1.0 || lo > hi)
      throw parameter_error("sweep range must sit inside [0, 1]");
    std::vector<double> g;
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    g.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) g.push_back(std::min(lo + step * i, hi));
    return g;
  };
  const std::vector<double> g1 = grid(p1_lo, p1_hi);
  const std::vector<double> g2 = grid(p2_lo, p2_hi);

  SweepResult out{kind, family1, family2, {}};
  out.points.reserve(g1.size() * g2.size());
  std::uint64_t index = 0;
  for (const double p1 : g1) {
    for (const double p2 : g2) {
      SeesawConfig point = config;
      point.seed = config.seed + index * 1000003ULL;
      const ProtocolDescriptor d =
          make_descriptor(kind, make_param(family1, p1), make_param(family2, p2));
      const ActivationResult r = activation_search(d, point);
      out.points.push_back({p1, p2, r.seesaw.best_value, r.activated});
      ++index;
    }
  }
  return out;
}

const std::vector<Table1Row>& table1_rows() {
  static const std::vector<Table1Row> rows = [] {
    const double dep_crit = 1.0 / std::sqrt(2.0);
    const double loss_crit = loss_threshold();
    return std::vector<Table1Row>{
        {ProtocolKind::Unidirectional, {ChannelFamily::AmplitudeDamping, 0.5},
         {ChannelFamily::Depolarizing, dep_crit}, 2.00541, 100},
        {ProtocolKind::Unidirectional, {ChannelFamily::Erasure, 0.5},
         {ChannelFamily::Depolarizing, dep_crit}, 2.00484, 100},
        {ProtocolKind::Bidirectional, {ChannelFamily::AmplitudeDamping, 0.5},
         {ChannelFamily::AmplitudeDamping, 0.5}, 2.01191, 100},
        {ProtocolKind::Bidirectional, {ChannelFamily::Erasure, 0.5},
         {ChannelFamily::Erasure, 0.5}, 2.00164, 200},
        {ProtocolKind::Bidirectional, {ChannelFamily::AmplitudeDamping, 0.5},
         {ChannelFamily::Loss, loss_crit}, 2.00211, 400},
        {ProtocolKind::Bidirectional, {ChannelFamily::AmplitudeDamping, 0.5},
         {ChannelFamily::Loss, 0.5}, 2.00031, 4000},
    };
  }();
  return rows;
}

std::vector<TableRowResult> reproduce_table(const SeesawConfig& config) {
  const auto& rows = table1_rows();
  std::vector<TableRowResult> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    SeesawConfig c = config;
    c.seed = config.seed + static_cast<std::uint64_t>(i) * 1000003ULL;
    c.restarts = std::max(config.restarts, rows[i].restarts_hint);
    const ProtocolDescriptor d = make_descriptor(rows[i].kind, rows[i].channel1, rows[i].channel2);
    out.push_back({rows[i], activation_search(d, c)});
  }
  return out;
}

namespace {

ComplexMatrix swap_qubit_pair(const ComplexMatrix& m) {
  return permute_subsystems(m, {2, 2}, {1, 0});
}

ComplexMatrix bell_from(const ComplexMatrix& m1, const ComplexMatrix& m2, const ComplexMatrix& n1,
                        const ComplexMatrix& n2) {
  return tensor_product(m1, n1 + n2) + tensor_product(m2, n1 - n2);
}

// CHSH value of the two-copy branch (first, second) with the given cut-side
// observables: copies are regrouped so Alexis holds both left halves.
double branch_value(const ComplexMatrix& first, const ComplexMatrix& second,
                    const ComplexMatrix& m1, const ComplexMatrix& m2, const ComplexMatrix& n1,
                    const ComplexMatrix& n2) {
  const ComplexMatrix cut =
      permute_subsystems(tensor_product(first, second), {2, 2, 2, 2}, {0, 2, 1, 3});
  return chsh_value_raw(bell_from(m1, m2, n1, n2), cut);
}

DensityMatrix build_flagged_mixture(const ComplexMatrix& s1, const ComplexMatrix& s2) {
  const ComplexMatrix p0 = outer(basis_ket(2, 0), basis_ket(2, 0));
  const ComplexMatrix p1 = outer(basis_ket(2, 1), basis_ket(2, 1));
  ComplexMatrix st = tensor_product(tensor_product(p0, p1), s1);
  st += tensor_product(tensor_product(p1, p0), s2);
  st *= cplx{0.5, 0.0};
  return DensityMatrix({2, 2, 2, 2}, std::move(st));
}

}  // namespace

DensityMatrix superactivation_state(const DensityMatrix& sigma1, const DensityMatrix& sigma2) {
  const std::vector<std::size_t> pair{2, 2};
  if (sigma1.dims() != pair || sigma2.dims() != pair)
    throw dimension_error("flagged construction takes two-qubit factors");
  if (horodecki_value(sigma1) > 2.0 + 1e-6 || horodecki_value(sigma2) > 2.0 + 1e-6)
    throw contract_error("flagged construction requires CHSH-local factors");
  return build_flagged_mixture(sigma1.matrix(), sigma2.matrix());
}

double superactivation_value(double v) {
  if (v < 2.0 - 1e-9 || v > 2.0 * std::sqrt(2.0) + 1e-9)
    throw parameter_error("pair value must lie in [2, 2*sqrt(2)]");
  return (2.0 * v + 4.0) / 4.0;
}

double superactivation_verify(const DensityMatrix& sigma1, const DensityMatrix& sigma2,
                              const std::array<ComplexMatrix, 2>& m_settings,
                              const std::array<ComplexMatrix, 2>& n_settings) {
  const std::vector<std::size_t> pair{2, 2};
  if (sigma1.dims() != pair || sigma2.dims() != pair)
    throw dimension_error("two-copy scheme takes two-qubit factors");
  for (const auto* settings : {&m_settings, &n_settings}) {
    for (const ComplexMatrix& s : *settings) {
      if (s.rows() != 4 || s.cols() != 4)
        throw dimension_error("scheme settings act on a two-qubit cut side");
    }
  }
  const double aligned = branch_value(sigma1.matrix(), sigma2.matrix(), m_settings[0],
                                      m_settings[1], n_settings[0], n_settings[1]);
  const double swapped = branch_value(
      sigma2.matrix(), sigma1.matrix(), swap_qubit_pair(m_settings[0]),
      swap_qubit_pair(m_settings[1]), swap_qubit_pair(n_settings[0]),
      swap_qubit_pair(n_settings[1]));
  const ComplexMatrix id4 = ComplexMatrix::identity(4);
  const double same1 = branch_value(sigma1.matrix(), sigma1.matrix(), id4, id4, id4, id4);
  const double same2 = branch_value(sigma2.matrix(), sigma2.matrix(), id4, id4, id4, id4);
  return 0.25 * (aligned + swapped + same1 + same2);
}

SuperactivationResult superactivate(const ChannelParam& channel1, const ChannelParam& channel2,
                                    const SeesawConfig& config) {
  const bool same = channel1.family == channel2.family && channel1.p == channel2.p;
  const ProtocolDescriptor proto =
      make_descriptor(ProtocolKind::Bidirectional, channel1, channel2, same);
  const KrausChannel ch1 = make_channel(channel1);
  const KrausChannel ch2 = make_channel(channel2);
  if (ch1.out_dim() != 2 || ch2.out_dim() != 2)
    throw dimension_error("the flagged construction needs qubit-to-qubit channels");
  SeesawResult sr = run_seesaw(proto, ch1, ch2, config);

  const ComplexMatrix o1 = apply_raw(ch1, sr.best_inputs[0].matrix(), {2, 2}, 1);
  const ComplexMatrix o2 = apply_raw(ch2, sr.best_inputs[1].matrix(), {2, 2}, 0);
  const DensityMatrix sigma1({2, 2}, o1);
  const DensityMatrix sigma2({2, 2}, o2);

  const double aligned =
      branch_value(o1, o2, sr.m1, sr.m2, sr.n1, sr.n2);
  const double swapped =
      branch_value(o2, o1, swap_qubit_pair(sr.m1), swap_qubit_pair(sr.m2),
                   swap_qubit_pair(sr.n1), swap_qubit_pair(sr.n2));
  const double scheme =
      superactivation_verify(sigma1, sigma2, {sr.m1, sr.m2}, {sr.n1, sr.n2});

  const double h1 = horodecki_value(sigma1);
  const double h2 = horodecki_value(sigma2);
  const double single_copy = 0.5 * (std::max(2.0, h1) + std::max(2.0, h2));

  DensityMatrix sigma_tilde = build_flagged_mixture(o1, o2);
  const ComplexMatrix mirrored =
      permute_subsystems(sigma_tilde.matrix(), {2, 2, 2, 2}, {1, 0, 3, 2});
  const bool symmetric = mirrored.approx_equal(sigma_tilde.matrix(), 1e-10);

  const bool superactivated = verify_breaking(channel1) && verify_breaking(channel2) &&
                              single_copy <= 2.0 + 1e-6 && scheme > 2.0 + 1e-4;

  return SuperactivationResult{
      channel1,
      channel2,
      aligned,
      swapped,
      scheme,
      single_copy,
      h1,
      h2,
      symmetric,
      superactivated,
      std::move(sr),
      std::move(sigma_tilde),
  };
}

}  // namespace qchsh

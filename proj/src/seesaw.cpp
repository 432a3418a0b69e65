#include "qchsh/seesaw.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "qchsh/channels.hpp"
#include "qchsh/matrix.hpp"
#include "qchsh/rng.hpp"
#include "qchsh/types.hpp"

namespace qchsh {

namespace {

std::vector<cplx> column(const ComplexMatrix& m, std::size_t j) {
  std::vector<cplx> v(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m(i, j);
  return v;
}

ComplexMatrix random_hermitian(std::size_t dim, Rng& rng) {
  ComplexMatrix g(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) g(i, j) = rng.complex_gaussian();
  return 0.5 * (g + g.adjoint());
}

struct BuiltObservable {
  ComplexMatrix m;
  double objective;  // tr(M F) for the operator F it was built from
};

// Observable maximizing tr(M F) within the sign class (balanced = false) or
// the equal-multiplicity projective class (balanced = true, even dim only).
BuiltObservable build_observable(const ComplexMatrix& f, bool balanced) {
  const std::size_t n = f.rows();
  if (balanced && n % 2 != 0) throw contract_error("balanced observable needs even dimension");
  const EigResult eig = hermitian_eig(f);
  ComplexMatrix m(n, n);
  double objective = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const bool plus = balanced ? (k < n / 2) : !(eig.values[k] < 0.0);
    const double s = plus ? 1.0 : -1.0;
    objective += s * eig.values[k];
    const std::vector<cplx> v = column(eig.vectors, k);
    m += s * outer(v, v);
  }
  return {std::move(m), objective};
}

// Tr over the op-side factor of (lifted op) sigma: pairing the result with an
// observable M on the other factor gives tr[(M (x) op) sigma] (op on side 1).
ComplexMatrix traced_objective(const ComplexMatrix& sigma_cut, std::size_t dim_a,
                               std::size_t dim_b, const ComplexMatrix& op, std::size_t op_side) {
  const ComplexMatrix lifted = lift_to_subsystem(op, {dim_a, dim_b}, op_side);
  const std::size_t keep = op_side == 0 ? 1 : 0;
  return ptrace(lifted * sigma_cut, {dim_a, dim_b}, {keep});
}

ComplexMatrix swap_pair(const ComplexMatrix& m) { return permute_subsystems(m, {2, 2}, {1, 0}); }

// Random entangled keep:send qubit pair, Schmidt weight uniform, local Haar
// frames. Far more likely than a Haar-random pure state to start inside the
// basin of a violating optimum when the channels are deeply noisy.
ComplexMatrix random_schmidt_pair(Rng& rng) {
  const double lambda = rng.uniform();
  std::vector<cplx> psi(4, cplx{0.0, 0.0});
  psi[1] = std::sqrt(lambda);
  psi[2] = std::sqrt(1.0 - lambda);
  const ComplexMatrix u = tensor_product(random_unitary(2, rng), random_unitary(2, rng));
  const std::vector<cplx> rotated = matvec(u, psi);
  return outer(rotated, rotated);
}

ComplexMatrix initial_input(const std::vector<std::size_t>& dims, Rng& rng) {
  ComplexMatrix state = random_schmidt_pair(rng);
  for (std::size_t k = 2; k < dims.size(); k += 2) {
    state = tensor_product(state, random_schmidt_pair(rng));
  }
  return state;
}

}  // namespace

DichotomicObservable observable_from_operator(const ComplexMatrix& f) {
  return DichotomicObservable(build_observable(f, false).m);
}

DichotomicObservable balanced_observable_from_operator(const ComplexMatrix& f) {
  return DichotomicObservable(build_observable(f, true).m);
}

ObservableUpdate update_observables_alexis(const ComplexMatrix& sigma_cut, std::size_t dim_a,
                                           std::size_t dim_b, const ComplexMatrix& n1,
                                           const ComplexMatrix& n2, bool balanced) {
  BuiltObservable b1 =
      build_observable(traced_objective(sigma_cut, dim_a, dim_b, n1 + n2, 1), balanced);
  BuiltObservable b2 =
      build_observable(traced_objective(sigma_cut, dim_a, dim_b, n1 - n2, 1), balanced);
  return {std::move(b1.m), std::move(b2.m), b1.objective + b2.objective};
}

ObservableUpdate update_observables_bobby(const ComplexMatrix& sigma_cut, std::size_t dim_a,
                                          std::size_t dim_b, const ComplexMatrix& m1,
                                          const ComplexMatrix& m2, bool balanced) {
  BuiltObservable b1 =
      build_observable(traced_objective(sigma_cut, dim_a, dim_b, m1 + m2, 0), balanced);
  BuiltObservable b2 =
      build_observable(traced_objective(sigma_cut, dim_a, dim_b, m1 - m2, 0), balanced);
  return {std::move(b1.m), std::move(b2.m), b1.objective + b2.objective};
}

StateUpdate update_state_single(const BellOperator& bell, const KrausChannel& ch) {
  const ComplexMatrix k = adjoint_apply(ch, bell.matrix, {2, ch.out_dim()}, 1);
  const EigResult eig = hermitian_eig(k);
  PureState psi({2, ch.in_dim()}, column(eig.vectors, 0));
  return {std::move(psi), eig.values[0]};
}

StateUpdate update_state_unidirectional(const BellOperator& bell, const KrausChannel& ch1,
                                        const KrausChannel& ch2) {
  const std::size_t d1 = ch1.out_dim(), d2 = ch2.out_dim();
  const ComplexMatrix b_nat = permute_subsystems(bell.matrix, {2, 2, d1, d2}, {0, 2, 1, 3});
  ComplexMatrix k = adjoint_apply(ch1, b_nat, {2, d1, 2, d2}, 1);
  k = adjoint_apply(ch2, k, {2, ch1.in_dim(), 2, d2}, 3);
  const EigResult eig = hermitian_eig(k);
  PureState psi({2, ch1.in_dim(), 2, ch2.in_dim()}, column(eig.vectors, 0));
  return {std::move(psi), eig.values[0]};
}

StateUpdate update_state_bidirectional(const BellOperator& bell, const KrausChannel& ch1,
                                       const KrausChannel& ch2, const ComplexMatrix& other_output,
                                       bool update_first) {
  const std::size_t d1 = ch1.out_dim(), d2 = ch2.out_dim();
  const ComplexMatrix b_nat = permute_subsystems(bell.matrix, {2, d2, d1, 2}, {0, 2, 1, 3});
  if (update_first) {
    const ComplexMatrix beff =
        ptrace(b_nat * tensor_product(ComplexMatrix::identity(2 * d1), other_output),
               {2, d1, d2, 2}, {0, 1});
    const ComplexMatrix k = adjoint_apply(ch1, beff, {2, d1}, 1);
    const EigResult eig = hermitian_eig(k);
    PureState psi({2, ch1.in_dim()}, column(eig.vectors, 0));
    return {std::move(psi), eig.values[0]};
  }
  const ComplexMatrix beff =
      ptrace(b_nat * tensor_product(other_output, ComplexMatrix::identity(d2 * 2)),
             {2, d1, d2, 2}, {2, 3});
  const ComplexMatrix k = adjoint_apply(ch2, beff, {d2, 2}, 0);
  const EigResult eig = hermitian_eig(k);
  PureState psi({ch2.in_dim(), 2}, column(eig.vectors, 0));
  return {std::move(psi), eig.values[0]};
}

ComplexMatrix perturb(const ComplexMatrix& rho, const ComplexMatrix& rho_star, double epsilon) {
  return (1.0 - epsilon) * rho + epsilon * rho_star;
}

ComplexMatrix make_perturbation_state(const std::vector<std::size_t>& dims, Rng& rng) {
  if (dims.size() < 2) throw contract_error("perturbation state needs at least two factors");
  std::size_t d_right = 1;
  for (std::size_t i = dims.size() / 2; i < dims.size(); ++i) d_right *= dims[i];
  const std::size_t total = product_dim(dims);
  const double lambda = rng.uniform();
  std::vector<cplx> psi(total, cplx{0.0, 0.0});
  psi[1] = std::sqrt(lambda);
  psi[d_right] = std::sqrt(1.0 - lambda);
  const ComplexMatrix u = random_unitary(total, rng);
  const std::vector<cplx> rotated = matvec(u, psi);
  return outer(rotated, rotated);
}

namespace {

struct CutShape {
  std::size_t dim_a;
  std::size_t dim_b;
};

CutShape cut_shape(const ProtocolDescriptor& proto, const KrausChannel& ch1,
                   const KrausChannel& ch2) {
  switch (proto.kind) {
    case ProtocolKind::SingleChannel:
      return {2, ch1.out_dim()};
    case ProtocolKind::Unidirectional:
      return {4, ch1.out_dim() * ch2.out_dim()};
    case ProtocolKind::Bidirectional:
      return {2 * ch2.out_dim(), ch1.out_dim() * 2};
  }
  throw parameter_error("unknown protocol kind");
}

// Channel outputs rearranged to the (Alexis, Bobby) cut ordering.
ComplexMatrix cut_state(const ProtocolDescriptor& proto, const KrausChannel& ch1,
                        const KrausChannel& ch2, const std::vector<ComplexMatrix>& rho) {
  switch (proto.kind) {
    case ProtocolKind::SingleChannel:
      return apply_raw(ch1, rho[0], {2, 2}, 1);
    case ProtocolKind::Unidirectional: {
      ComplexMatrix out = apply_raw(ch1, rho[0], {2, 2, 2, 2}, 1);
      out = apply_raw(ch2, out, {2, ch1.out_dim(), 2, 2}, 3);
      return permute_subsystems(out, {2, ch1.out_dim(), 2, ch2.out_dim()},
                                proto.cut_permutation);
    }
    case ProtocolKind::Bidirectional: {
      const ComplexMatrix o1 = apply_raw(ch1, rho[0], {2, 2}, 1);
      const ComplexMatrix o2 = apply_raw(ch2, rho[1], {2, 2}, 0);
      return permute_subsystems(tensor_product(o1, o2),
                                {2, ch1.out_dim(), ch2.out_dim(), 2}, proto.cut_permutation);
    }
  }
  throw parameter_error("unknown protocol kind");
}

ComplexMatrix bell_matrix(const ComplexMatrix& m1, const ComplexMatrix& m2,
                          const ComplexMatrix& n1, const ComplexMatrix& n2) {
  return tensor_product(m1, n1 + n2) + tensor_product(m2, n1 - n2);
}

// Value of the symmetric-pair configuration rho2 = F rho1 F.
double symmetric_value(const ProtocolDescriptor& proto, const BellOperator& bell,
                       const KrausChannel& ch1, const KrausChannel& ch2,
                       const ComplexMatrix& rho1) {
  const ComplexMatrix o1 = apply_raw(ch1, rho1, {2, 2}, 1);
  const ComplexMatrix o2 = apply_raw(ch2, swap_pair(rho1), {2, 2}, 0);
  const ComplexMatrix cut =
      permute_subsystems(tensor_product(o1, o2), {2, ch1.out_dim(), ch2.out_dim(), 2},
                         proto.cut_permutation);
  return chsh_value_raw(bell.matrix, cut);
}

// Constrained update: conditional optima of either factor, re-symmetrized and
// accepted only when they do not lower the value.
double update_states_symmetric(const ProtocolDescriptor& proto, const BellOperator& bell,
                               const KrausChannel& ch1, const KrausChannel& ch2,
                               std::vector<ComplexMatrix>& rho) {
  double best = symmetric_value(proto, bell, ch1, ch2, rho[0]);
  const ComplexMatrix o2 = apply_raw(ch2, rho[1], {2, 2}, 0);
  const ComplexMatrix cand1 =
      update_state_bidirectional(bell, ch1, ch2, o2, true).state.projector();
  const ComplexMatrix o1 = apply_raw(ch1, rho[0], {2, 2}, 1);
  const ComplexMatrix cand2 =
      swap_pair(update_state_bidirectional(bell, ch1, ch2, o1, false).state.projector());
  for (const ComplexMatrix* cand : {&cand1, &cand2}) {
    const double v = symmetric_value(proto, bell, ch1, ch2, *cand);
    if (v > best) {
      best = v;
      rho[0] = *cand;
    }
  }
  rho[1] = swap_pair(rho[0]);
  return best;
}

double update_states(const ProtocolDescriptor& proto, const KrausChannel& ch1,
                     const KrausChannel& ch2, const ComplexMatrix& m1, const ComplexMatrix& m2,
                     const ComplexMatrix& n1, const ComplexMatrix& n2,
                     std::vector<ComplexMatrix>& rho) {
  const CutShape shape = cut_shape(proto, ch1, ch2);
  const BellOperator bell{shape.dim_a, shape.dim_b, bell_matrix(m1, m2, n1, n2)};
  switch (proto.kind) {
    case ProtocolKind::SingleChannel: {
      const StateUpdate up = update_state_single(bell, ch1);
      rho[0] = up.state.projector();
      return up.objective;
    }
    case ProtocolKind::Unidirectional: {
      const StateUpdate up = update_state_unidirectional(bell, ch1, ch2);
      rho[0] = up.state.projector();
      return up.objective;
    }
    case ProtocolKind::Bidirectional: {
      if (proto.symmetric_pair) return update_states_symmetric(proto, bell, ch1, ch2, rho);
      const ComplexMatrix o2 = apply_raw(ch2, rho[1], {2, 2}, 0);
      const StateUpdate up1 = update_state_bidirectional(bell, ch1, ch2, o2, true);
      rho[0] = up1.state.projector();
      const ComplexMatrix o1 = apply_raw(ch1, rho[0], {2, 2}, 1);
      const StateUpdate up2 = update_state_bidirectional(bell, ch1, ch2, o1, false);
      rho[1] = up2.state.projector();
      return up2.objective;
    }
  }
  throw parameter_error("unknown protocol kind");
}

struct RestartOutcome {
  double best_value = -std::numeric_limits<double>::infinity();
  std::vector<ComplexMatrix> best_rho;
  ComplexMatrix m1, m2, n1, n2;
  std::vector<std::pair<int, double>> trace;
  std::vector<int> perturb_events;
  bool converged = false;
};

RestartOutcome run_restart(const ProtocolDescriptor& proto, const KrausChannel& ch1,
                           const KrausChannel& ch2, const SeesawConfig& config,
                           int restart_index) {
  Rng rng(config.seed + static_cast<std::uint64_t>(restart_index));
  const CutShape shape = cut_shape(proto, ch1, ch2);
  const bool single = proto.kind == ProtocolKind::SingleChannel;
  // Restricting to traceless (projective) observables matches the
  // fixed-channel figure of merit; without it the sign updates can lock onto
  // the all-identity point, which scores exactly 2 for any state. Odd
  // dimensions (erasure output) stay on plain sign updates.
  const bool bal_a = single && shape.dim_a % 2 == 0;
  const bool bal_b = single && shape.dim_b % 2 == 0;

  std::vector<std::vector<std::size_t>> rho_dims;
  if (proto.kind == ProtocolKind::Unidirectional) {
    rho_dims = {{2, 2, 2, 2}};
  } else if (proto.kind == ProtocolKind::Bidirectional) {
    rho_dims = {{2, 2}, {2, 2}};
  } else {
    rho_dims = {{2, 2}};
  }
  std::vector<ComplexMatrix> rho;
  rho.reserve(rho_dims.size());
  for (const auto& d : rho_dims) rho.push_back(initial_input(d, rng));
  if (proto.symmetric_pair) rho[1] = swap_pair(rho[0]);

  ComplexMatrix n1 = build_observable(random_hermitian(shape.dim_b, rng), bal_b).m;
  ComplexMatrix n2 = build_observable(random_hermitian(shape.dim_b, rng), bal_b).m;
  ComplexMatrix m1, m2;

  RestartOutcome out;
  double prev_value = -std::numeric_limits<double>::infinity();
  double plateau_best = -std::numeric_limits<double>::infinity();
  int stall_count = 0;
  int fruitless_plateaus = 0;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    ComplexMatrix sigma = cut_state(proto, ch1, ch2, rho);
    ObservableUpdate ua =
        update_observables_alexis(sigma, shape.dim_a, shape.dim_b, n1, n2, bal_a);
    m1 = std::move(ua.first);
    m2 = std::move(ua.second);
    update_states(proto, ch1, ch2, m1, m2, n1, n2, rho);

    sigma = cut_state(proto, ch1, ch2, rho);
    ObservableUpdate ub =
        update_observables_bobby(sigma, shape.dim_a, shape.dim_b, m1, m2, bal_b);
    n1 = std::move(ub.first);
    n2 = std::move(ub.second);
    const double value = update_states(proto, ch1, ch2, m1, m2, n1, n2, rho);

    out.trace.emplace_back(iter, value);
    if (value > out.best_value) {
      out.best_value = value;
      out.best_rho = rho;
      out.m1 = m1;
      out.m2 = m2;
      out.n1 = n1;
      out.n2 = n2;
    }

    if (std::abs(value - prev_value) <= config.value_equality_tol) {
      ++stall_count;
    } else {
      stall_count = 0;
    }
    prev_value = value;

    if (stall_count < config.stall_threshold) continue;
    stall_count = 0;
    if (out.best_value > plateau_best + config.value_equality_tol) {
      fruitless_plateaus = 0;
    } else {
      ++fruitless_plateaus;
    }
    plateau_best = std::max(plateau_best, out.best_value);
    if (fruitless_plateaus >= 5) {
      out.converged = true;
      break;
    }
    if (rng.uniform() < config.perturb_probability) {
      out.perturb_events.push_back(iter);
      if (proto.symmetric_pair) {
        rho[0] = perturb(rho[0], make_perturbation_state(rho_dims[0], rng), config.epsilon);
        rho[1] = swap_pair(rho[0]);
      } else {
        for (std::size_t i = 0; i < rho.size(); ++i) {
          rho[i] = perturb(rho[i], make_perturbation_state(rho_dims[i], rng), config.epsilon);
        }
      }
      prev_value = -std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

}  // namespace

SeesawResult run_seesaw(const ProtocolDescriptor& protocol, const KrausChannel& ch1,
                        const KrausChannel& ch2, const SeesawConfig& config) {
  if (config.restarts < 1) throw parameter_error("restarts must be >= 1");
  if (config.max_iterations < 1) throw parameter_error("max_iterations must be >= 1");
  if (config.stall_threshold < 1) throw parameter_error("stall_threshold must be >= 1");
  if (!(config.epsilon > 0.0 && config.epsilon < 1.0))
    throw parameter_error("epsilon must lie in (0, 1)");
  if (!(config.perturb_probability > 0.0 && config.perturb_probability <= 1.0))
    throw parameter_error("perturb_probability must lie in (0, 1]");
  if (ch1.in_dim() != 2 || ch2.in_dim() != 2)
    throw dimension_error("see-saw protocols feed qubits into the channels");
  if (protocol.symmetric_pair && protocol.kind != ProtocolKind::Bidirectional)
    throw contract_error("symmetric pair constraint is bidirectional-only");

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(config.restarts));
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  const auto worker = [&]() {
    for (;;) {
      const int idx = next.fetch_add(1);
      if (idx >= config.restarts) return;
      try {
        outcomes[static_cast<std::size_t>(idx)] = run_restart(protocol, ch1, ch2, config, idx);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  unsigned n_threads =
      std::min<unsigned>(std::thread::hardware_concurrency(), static_cast<unsigned>(config.restarts));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  SeesawResult result;
  result.restart_values.reserve(outcomes.size());
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    result.restart_values.push_back(outcomes[i].best_value);
    if (outcomes[i].best_value > outcomes[best_idx].best_value) best_idx = i;
  }
  RestartOutcome& best = outcomes[best_idx];
  result.best_value = best.best_value;
  result.restart_index = static_cast<int>(best_idx);
  result.converged = best.converged;
  result.value_trace = std::move(best.trace);
  result.perturb_events = std::move(best.perturb_events);
  result.m1 = std::move(best.m1);
  result.m2 = std::move(best.m2);
  result.n1 = std::move(best.n1);
  result.n2 = std::move(best.n2);

  std::vector<std::vector<std::size_t>> rho_dims;
  if (protocol.kind == ProtocolKind::Unidirectional) {
    rho_dims = {{2, 2, 2, 2}};
  } else if (protocol.kind == ProtocolKind::Bidirectional) {
    rho_dims = {{2, 2}, {2, 2}};
  } else {
    rho_dims = {{2, 2}};
  }
  for (std::size_t i = 0; i < best.best_rho.size(); ++i) {
    result.best_inputs.push_back(DensityMatrix(rho_dims[i], std::move(best.best_rho[i])));
  }
  return result;
}

namespace {

using Vec3 = std::array<double, 3>;

Vec3 add3(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 sub3(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 normalize_or(const Vec3& v, const Vec3& fallback) {
  const double n = std::sqrt(dot3(v, v));
  if (n < 1e-14) return fallback;
  return {v[0] / n, v[1] / n, v[2] / n};
}

Vec3 random_unit(Rng& rng) {
  for (;;) {
    const Vec3 v{rng.gaussian(), rng.gaussian(), rng.gaussian()};
    const double n = std::sqrt(dot3(v, v));
    if (n > 1e-6) return {v[0] / n, v[1] / n, v[2] / n};
  }
}

}  // namespace

double max_chsh_two_qubit(const DensityMatrix& rho, int restarts, int iterations,
                          std::uint64_t seed) {
  if (restarts < 1 || iterations < 1) throw parameter_error("restarts/iterations must be >= 1");
  const CorrelationMatrix corr = correlation_matrix(rho);
  const auto apply_t = [&corr](const Vec3& v, bool transposed) {
    Vec3 out{0.0, 0.0, 0.0};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[i] += (transposed ? corr.t[j][i] : corr.t[i][j]) * v[j];
    return out;
  };

  double best = 0.0;
  for (int r = 0; r < restarts; ++r) {
    Rng rng(seed + static_cast<std::uint64_t>(r));
    Vec3 n1 = random_unit(rng);
    Vec3 n2 = random_unit(rng);
    Vec3 m1{1.0, 0.0, 0.0};
    Vec3 m2{0.0, 1.0, 0.0};
    double value = 0.0;
    double prev = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < iterations; ++it) {
      m1 = normalize_or(apply_t(add3(n1, n2), false), m1);
      m2 = normalize_or(apply_t(sub3(n1, n2), false), m2);
      n1 = normalize_or(apply_t(add3(m1, m2), true), n1);
      n2 = normalize_or(apply_t(sub3(m1, m2), true), n2);
      value = dot3(m1, apply_t(add3(n1, n2), false)) + dot3(m2, apply_t(sub3(n1, n2), false));
      if (std::abs(value - prev) < 1e-13) break;
      prev = value;
    }
    best = std::max(best, value);
  }
  return best;
}

}  // namespace qchsh

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "qchsh/matrix.hpp"

namespace qchsh {

enum class ChannelFamily { Depolarizing, AmplitudeDamping, Loss, Erasure };

// Short code used in CLI channel specs and CSV/JSON output.
std::string_view family_code(ChannelFamily family);
ChannelFamily family_from_code(std::string_view code);

// A channel family plus its transmission/visibility parameter p in [0, 1].
struct ChannelParam {
  ChannelFamily family;
  double p;

  bool operator==(const ChannelParam&) const = default;
};

ChannelParam make_param(ChannelFamily family, double p);

// Parses "ad:0.5", "dep:0.7071067811865476", "loss:0.618", "er:0.5".
ChannelParam parse_channel_spec(std::string_view spec);
std::string spec_string(const ChannelParam& param);

// Completely positive trace-preserving map in Kraus form. Operators are
// out_dim x in_dim; construction verifies sum_k E_k^H E_k = I and positivity
// of the Choi matrix.
class KrausChannel {
 public:
  KrausChannel(std::size_t in_dim, std::size_t out_dim, std::vector<ComplexMatrix> ops,
               std::string label, double tol = kDefaultTol);

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }
  const std::vector<ComplexMatrix>& kraus() const { return ops_; }
  const std::string& label() const { return label_; }
  bool is_square() const { return in_dim_ == out_dim_; }

  // Choi matrix sum_{ij} |i><j| (x) E(|i><j|), ordered (input copy, output).
  ComplexMatrix choi() const;

 private:
  std::size_t in_dim_;
  std::size_t out_dim_;
  std::vector<ComplexMatrix> ops_;
  std::string label_;
};

// p*rho + (1-p)*tr(rho) I/2.
KrausChannel make_depolarizing(double p);
// Decay toward |0>: E1 = |0><0| + sqrt(p)|1><1|, E2 = sqrt(1-p)|0><1|.
KrausChannel make_amplitude_damping(double p);
// Transmit with probability p, otherwise replace by |0><0|.
KrausChannel make_loss(double p);
// Qubit -> qutrit: transmit with probability p, otherwise output the flag
// state |e> (third basis vector).
KrausChannel make_erasure(double p);
KrausChannel make_identity(std::size_t dim);
KrausChannel make_channel(const ChannelParam& param);

// Applies the channel to factor `target` of rho.
DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho, std::size_t target);

// Same, on a raw matrix (no density-matrix validation); returns the new
// matrix, with dims[target] replaced by out_dim in the caller's bookkeeping.
ComplexMatrix apply_raw(const KrausChannel& ch, const ComplexMatrix& m,
                        const std::vector<std::size_t>& dims, std::size_t target);

// Heisenberg picture: sum_k E_k^H obs E_k on factor `target` (obs lives on
// the output space there; the result lives on the input space).
ComplexMatrix adjoint_apply(const KrausChannel& ch, const ComplexMatrix& obs,
                            const std::vector<std::size_t>& dims, std::size_t target);

// Qubit channel in Bloch form: v -> shift + lambda v.
struct AffineRep {
  std::array<double, 3> shift;
  std::array<std::array<double, 3>, 3> lambda;
};

// Tomographic affine representation of a qubit-to-qubit channel.
AffineRep affine_rep(const KrausChannel& ch);
DensityMatrix affine_apply(const AffineRep& rep, const DensityMatrix& rho);

bool is_unital(const KrausChannel& ch, double tol = kDefaultTol);

// Peres-Horodecki test on the Choi matrix (qubit-to-qubit channels only):
// true iff the partial transpose stays positive semidefinite, i.e. the
// channel destroys all entanglement.
bool is_entanglement_breaking_qubit(const KrausChannel& ch);

// Channels compared as maps (equal Choi matrices), not Kraus-list identity.
bool channels_approx_equal(const KrausChannel& a, const KrausChannel& b,
                           double tol = kDefaultTol);

// Random mixed-unitary qubit channel V (sum_i p_i s_i U rho U^H s_i) V^H;
// always unital. Used by property tests.
KrausChannel random_unital_qubit_channel(Rng& rng);

}  // namespace qchsh

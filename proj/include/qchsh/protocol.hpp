#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "qchsh/channels.hpp"

namespace qchsh {

// Distribution scenario for the CHSH optimization.
//   SingleChannel:  rho^{AA'}, one channel on A'. Cut A : B.
//   Unidirectional: rho on (A, A~, A', A~'), channels on A~ and A~'
//                   (both sent to Bobby). Cut AA' : BB'.
//   Bidirectional:  rho1^{A s} (s -> Bobby through ch1), rho2^{s' B'}
//                   (s' -> Alexis through ch2). Cut AA' : BB'.
enum class ProtocolKind { SingleChannel, Unidirectional, Bidirectional };

std::string_view kind_code(ProtocolKind kind);
ProtocolKind kind_from_code(std::string_view code);

struct ProtocolDescriptor {
  ProtocolKind kind;
  ChannelParam channel1;
  std::optional<ChannelParam> channel2;
  // Reorders the natural channel-output factor order into (Alexis factors,
  // Bobby factors) for Bell-operator evaluation; see permute_subsystems.
  std::vector<std::size_t> cut_permutation;
  // Bidirectional only: constrain the second input factor to the swap image
  // of the first, so the two output factors satisfy sigma2 = F sigma1 F.
  bool symmetric_pair = false;

  bool operator==(const ProtocolDescriptor&) const = default;
};

ProtocolDescriptor make_descriptor(ProtocolKind kind, const ChannelParam& channel1,
                                   std::optional<ChannelParam> channel2 = std::nullopt,
                                   bool symmetric_pair = false);

}  // namespace qchsh

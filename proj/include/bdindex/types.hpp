#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bdindex {

// Internal vertex ids are dense 0..n-1. External labels live in Graph::label().
using vertex_t = std::uint32_t;

inline constexpr vertex_t kNoVertex = static_cast<vertex_t>(-1);

enum class ErrorKind {
  parse_error,          // malformed input line / header
  self_loop,            // u == v edge in input
  edge_conflict,        // duplicate edge with disagreeing weight
  empty_graph,          // no vertices
  disconnected,         // graph is not connected
  out_of_range,         // vertex id >= n
  unknown_label,        // external label not present in id map
  invalid_hierarchy,    // tree fails structural or separator validation
  singular_matrix,      // Cholesky hit a non-positive pivot
  numerical_breakdown,  // non-root f_v fell below the positivity floor
  negative_result,      // distance came out negative beyond clamp tolerance
  no_convergence,       // truncated-walk refinement hit its step cap
  size_guard,           // input exceeds a debug-oracle size limit
  io_error,             // file could not be opened / written
  bad_format,           // serialized index: wrong magic or version
  truncated,            // serialized index: ran out of bytes
  checksum_mismatch,    // serialized index: CRC trailer does not match
  invariant_violation,  // serialized index: payload fails re-validation
  mismatch,             // index and graph disagree (n or id map)
  bad_arguments,        // CLI usage error
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bdindex

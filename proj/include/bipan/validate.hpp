#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bipan/model.hpp"

namespace bipan {

enum class Severity { Error, Warning };

std::string_view to_string(Severity severity);

struct Diagnostic {
  std::string code;
  Severity severity = Severity::Error;
  std::vector<NodeId> nodes;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Findings sorted by (code, first node id).
struct Diagnostics {
  std::vector<Diagnostic> items;

  std::size_t error_count() const;
  std::size_t warning_count() const;
  bool has_errors() const { return error_count() > 0; }
  bool contains(std::string_view code) const;
  bool contains(std::string_view code, const NodeId& node) const;

  friend bool operator==(const Diagnostics&, const Diagnostics&) = default;
};

/// Runs the fixed structural check list:
///
///   V001  process without exactly one Output product
///   V002  process with zero Input products
///   V003  product with more than one producer or consumer
///   V004  not exactly one Final product
///   V005  Final product has a consumer or no producer
///   V006  Stage lacking a producer or a consumer
///   V007  Elementary/SubProduct/Fastener with a producer
///   V008  cycle in the flow graph
///   V009  (warning) process without skill edges
///   V010  (warning) node unreachable from the Final product
///   V011  fastens link whose endpoints are not co-inputs of one process
///   V012  position with a non-finite component
///
/// Cascading findings are all reported. V010 is skipped when the model has
/// no Final product, since V004 already covers that case.
Diagnostics validate(const BiPanModel& model);

/// Throws Error("invalid-model") listing the error codes if validate() finds any.
void require_valid(const BiPanModel& model);

}  // namespace bipan

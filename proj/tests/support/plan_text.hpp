#pragma once

#include <string>
#include <vector>

#include "bipan/plan.hpp"

namespace bipan::testing {

/// "F p1", "R p5", "S p2 mod8>mod8r"
inline std::vector<std::string> summary(const Plan& plan) {
  std::vector<std::string> out;
  for (const auto& step : plan.steps) {
    std::string line;
    switch (step.direction) {
      case Direction::Forward: line = "F "; break;
      case Direction::Reverse: line = "R "; break;
      case Direction::Swap: line = "S "; break;
    }
    line += step.process.str();
    if (step.direction == Direction::Swap) line += " " + step.swap_target->str() + ">" + step.swap_replacement->str();
    out.push_back(line);
  }
  return out;
}

using Lines = std::vector<std::string>;

}  // namespace bipan::testing

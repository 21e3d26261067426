#pragma once

#include <iosfwd>

#include "vargram/harness.hpp"

namespace vargram {

// JSON model files. Integer-valued counts round-trip exactly; real counts
// round-trip through shortest-representation serialization.
void save_model(const TrainedModel& model, std::ostream& out);
TrainedModel load_model(std::istream& in);

}  // namespace vargram

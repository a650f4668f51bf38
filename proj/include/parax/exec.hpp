#pragma once

namespace parax {

/// Serial reference loop or OpenMP kernel. Both produce identical results.
enum class Exec { serial, parallel };

}  // namespace parax

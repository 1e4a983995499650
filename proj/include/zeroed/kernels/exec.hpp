#pragma once

namespace zeroed {

/// Selects the serial reference kernel or its OpenMP counterpart. Both
/// produce bit-identical results; the serial path is kept for testing.
enum class Exec { Serial, Parallel };

}  // namespace zeroed

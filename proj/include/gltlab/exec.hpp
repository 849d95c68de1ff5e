#pragma once

namespace gltlab {

/// Selects the serial reference loop or the OpenMP loop of a kernel. Both
/// produce bit-identical results; the serial path exists for testing.
enum class Exec { serial, parallel };

}  // namespace gltlab

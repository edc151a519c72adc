#pragma once

namespace ipcfuse {

/// Execution policy for the data-parallel kernels. Every kernel has a plain
/// serial loop (the reference) and an OpenMP variant; results are required to
/// be identical, which the test suite checks and the bench tool times.
enum class Exec { Serial, Parallel };

}  // namespace ipcfuse

#pragma once

namespace rscf {

// Fast built-in oracle battery (a few seconds); prints one line per check
// and returns true when every check passes.
bool run_selftest();

}  // namespace rscf

#pragma once

namespace rscf {

// Entry point behind the rscf binary. Returns 0 on success, 1 on bad
// configuration or usage, 2 on runtime failure.
int cli_main(int argc, char** argv);

}  // namespace rscf

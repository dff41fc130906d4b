#pragma once

namespace surveyclust {

// Entry point of the `surveyclust` binary. Returns the process exit code: 0 success,
// 1 other failures, 2 configuration or usage errors, 3 pipeline stage errors, 4 I/O errors.
int run_cli(int argc, char** argv);

}  // namespace surveyclust

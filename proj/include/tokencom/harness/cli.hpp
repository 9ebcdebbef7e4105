#pragma once

namespace tokencom::harness {

// Subcommands: gen-data, train, eval, sweep-snr, sweep-tokens,
// compression-report. Flags: --config <path|default>, --seed <n>, --out <dir>.
// Exit 0 on success, 2 on usage errors, 1 otherwise (one-line error on
// stderr).
int run_cli(int argc, char** argv);

}  // namespace tokencom::harness

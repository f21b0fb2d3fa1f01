// Command-line surface.  One entry point runs a full command line against
// caller-supplied streams, which keeps every subcommand testable in-process.
//
// Subcommands: check, eval, unnest, rank, qtable, equiv, game, scott-rank,
// invariants, scott-sentence, fuzz.  All output is a pure function of the
// inputs (files, flags, seed); reruns are byte-identical.
//
// Exit codes: 0 success, 1 validation failure (bad input files, unknown
// names, violated laws, exceeded caps), 2 property counterexample (a
// disagreement found by `equiv` or `fuzz`), 64 usage error.
#pragma once

#include <iosfwd>

namespace wb {

int runCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace wb

// The dynamic back-and-forth game: legality engine, two solvers (refinement
// table and independent bounded search), machine strategies derived from the
// table's cover witnesses, and text-mode interactive play.
//
// A position holds the current partial isomorphism h*, the current stage q*,
// and the remaining ordinal budget.  Player I lowers the budget and moves a
// tuple on either side; player II answers with a cover: pieces (h_j, q_j,
// t_j-bar) whose stages join to the moved tuple's extent, each h_j extending
// the q_j-slice of h* and mapping the restricted tuple pointwise.  Player I
// then picks one piece to continue in.  The player who cannot move loses.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "workbench/backforth.hpp"

namespace wb {

enum class Winner { I, II };
enum class SolveMode { Table, Search };

struct GameConfig {
  StructurePtr m, n;
  std::vector<Sec> abar, bbar;  // positional start map (may be empty)
  int alpha = 2;
  int moveCap = 1;
};

struct GameState {
  int isoId;   // current h*, as a universe id
  Elem q;      // current stage q*
  int bound;   // remaining budget
};

struct MoveI {
  int alphaNext = 0;
  int side = 0;  // 0: tuple from M, 1: tuple from N
  std::vector<Sec> tuple;
};

struct CoverPieceMove {
  Elem q;
  std::vector<Sec> image;  // t_j-bar, on the side opposite the moved tuple
  int isoId;               // played h_j
};

struct MoveII {
  std::vector<CoverPieceMove> pieces;
};

// Supplies move text for interactive play; returns nullopt when exhausted
// (treated as resignation).
struct MoveSource {
  virtual ~MoveSource() = default;
  virtual std::optional<std::string> next(const std::string& prompt) = 0;
};

class ScriptedMoveSource : public MoveSource {
public:
  explicit ScriptedMoveSource(std::vector<std::string> lines)
      : lines_(std::move(lines)) {}
  std::optional<std::string> next(const std::string&) override {
    if (pos_ >= lines_.size()) return std::nullopt;
    return lines_[pos_++];
  }

private:
  std::vector<std::string> lines_;
  std::size_t pos_ = 0;
};

class StdinMoveSource : public MoveSource {
public:
  std::optional<std::string> next(const std::string& prompt) override;
};

struct Transcript {
  std::vector<std::string> log;
  Winner winner;
};

class GameSession {
public:
  explicit GameSession(GameConfig cfg);

  const GameConfig& config() const { return cfg_; }
  QTable& table() { return *qt_; }

  // Initial position; nullopt when the positional start map is not a partial
  // isomorphism (then player I wins outright and play() refuses to start).
  std::optional<GameState> initialState() const { return initial_; }

  Winner solve(SolveMode mode);

  // Legality; empty string = legal, otherwise the violated rule.
  std::string checkMoveI(const GameState& st, const MoveI& mv) const;
  std::string checkMoveII(const GameState& st, const MoveI& mv, const MoveII& reply);

  std::vector<MoveI> legalMovesI(const GameState& st) const;
  // Representative legal covers: one per subset of feasible stages whose
  // join reaches the tuple's extent.
  std::vector<MoveII> legalMovesII(const GameState& st, const MoveI& mv);

  // Machine strategies.  The II reply realizes the table's cover witnesses
  // (minimal h_j: slice plus the moved pairs); nullopt when no legal cover
  // exists.  The I move prefers a move the search solver refutes.
  std::optional<MoveII> machineReplyII(const GameState& st, const MoveI& mv);
  std::optional<MoveI> machineMoveI(const GameState& st);

  GameState afterBranch(const MoveI& mv, const MoveII& reply, int branch) const;

  // Independent bounded search (no use of the refinement levels).
  bool searchIIWins(const GameState& st);

  // humanSide: 0 = human plays I, 1 = human plays II, -1 = machine vs
  // machine.  Machine moves are derived live; illegal human moves are
  // rejected with the violated rule and re-prompted.
  Transcript play(int humanSide, MoveSource& in);

private:
  bool coverFor(const GameState& st, int alphaNext, const MoveI& mv,
                std::vector<CoverPieceMove>& out, bool searchMode);
  std::optional<MoveI> parseMoveI(const std::string& text, std::string& err) const;
  std::optional<MoveII> parseMoveII(const GameState& st, const MoveI& mv,
                                    const std::string& text, std::string& err);
  std::string showMoveI(const MoveI& mv) const;

  GameConfig cfg_;
  std::unique_ptr<QTable> qt_;
  std::optional<GameState> initial_;
  std::map<std::tuple<int, Elem, int>, bool> searchMemo_;
};

}  // namespace wb

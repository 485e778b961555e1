#pragma once

// Go 7x7 rules engine: Tromp-Taylor area scoring, single-point ko plus
// positional superko, player-relative observations, and the two scripted
// opponents used for data collection and evaluation.

#include <array>
#include <bitset>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ct/random.hpp"

namespace ct::go {

inline constexpr int kBoardSize = 7;
inline constexpr int kNumPoints = kBoardSize * kBoardSize;
inline constexpr int kPassIndex = kNumPoints;
inline constexpr int kNumActions = kNumPoints + 1;
inline constexpr int kMoveCap = 500;
inline constexpr double kKomi = 8.5;
inline constexpr int kObservationSize = 3 * kNumPoints;

enum class Color : std::uint8_t { Empty = 0, Black = 1, White = 2 };

constexpr Color opponent(Color c) {
    return c == Color::Black ? Color::White : (c == Color::White ? Color::Black : Color::Empty);
}

const char* color_name(Color c);

/// Action index: 0..48 are board points in row-major order, 49 is pass.
struct Action {
    int index = kPassIndex;

    static constexpr Action pass() { return Action{kPassIndex}; }
    static constexpr Action at(int row, int col) { return Action{row * kBoardSize + col}; }

    constexpr bool is_pass() const { return index == kPassIndex; }
    constexpr int row() const { return index / kBoardSize; }
    constexpr int col() const { return index % kBoardSize; }
    friend constexpr bool operator==(Action, Action) = default;
};

using Bitboard = std::uint64_t;
using LegalMask = std::bitset<kNumActions>;

/// Exact whole-board position (used for positional superko).
struct PositionKey {
    Bitboard black = 0;
    Bitboard white = 0;
    friend constexpr bool operator==(const PositionKey&, const PositionKey&) = default;
    std::uint64_t hash() const;
};

enum class IllegalReason { Occupied, Suicide, Ko, Superko, Terminal };

const char* reason_name(IllegalReason r);

class IllegalMove : public std::runtime_error {
public:
    IllegalMove(Action a, IllegalReason reason);
    Action action() const { return action_; }
    IllegalReason reason() const { return reason_; }

private:
    Action action_;
    IllegalReason reason_;
};

class GameOver : public std::logic_error {
public:
    GameOver() : std::logic_error("game over") {}
};

class NotTerminal : public std::logic_error {
public:
    NotTerminal() : std::logic_error("game is not over") {}
};

/// Immutable-by-convention game state. Operations return new values.
class BoardState {
public:
    BoardState();

    /// Position built from explicit stone sets; history starts at that position.
    static BoardState from_position(Bitboard black, Bitboard white, Color to_move);

    Color at(int point) const;
    Color at(int row, int col) const { return at(row * kBoardSize + col); }
    Bitboard stones(Color c) const { return c == Color::Black ? black_ : (c == Color::White ? white_ : empty()); }
    Bitboard empty() const;
    Color to_move() const { return to_move_; }
    std::optional<int> ko_point() const { return ko_point_; }
    int consecutive_passes() const { return consecutive_passes_; }
    int move_count() const { return move_count_; }
    const std::vector<PositionKey>& history() const { return history_; }
    PositionKey key() const { return {black_, white_}; }

    /// Two consecutive passes, or the move cap reached.
    bool is_terminal() const { return consecutive_passes_ >= 2 || move_count_ >= kMoveCap; }

    friend bool operator==(const BoardState&, const BoardState&) = default;

private:
    friend class Rules;
    Bitboard black_ = 0;
    Bitboard white_ = 0;
    Color to_move_ = Color::Black;
    std::optional<int> ko_point_;
    int consecutive_passes_ = 0;
    int move_count_ = 0;
    std::vector<PositionKey> history_;
};

BoardState new_game();

/// Legality of every action. Throws GameOver on a terminal state.
LegalMask legal_mask(const BoardState& s);

/// Reason a move is illegal, or nullopt if it is legal.
std::optional<IllegalReason> check_move(const BoardState& s, Action a);

/// Throws IllegalMove on an illegal action.
BoardState apply(const BoardState& s, Action a);

struct Score {
    double black = 0.0;
    double white = 0.0;
    Color winner = Color::White;
};

/// Tromp-Taylor area score with komi. Throws NotTerminal unless s is terminal.
Score score(const BoardState& s);

/// Area score without the terminal check (used for capped or diagnostic scoring).
Score area_score(const BoardState& s);

/// 7x7x3 planes flattened plane-major: [plane * 49 + point].
/// Plane 0 holds the side to move's stones, plane 1 the opponent's, plane 2 empty points.
struct Observation {
    std::array<float, kObservationSize> planes{};

    float at(int plane, int point) const { return planes[plane * kNumPoints + point]; }
    friend bool operator==(const Observation&, const Observation&) = default;
};

Observation observe(const BoardState& s);

// Bitboard helpers shared by the opponents and the handcrafted features.
namespace bits {
inline constexpr Bitboard kBoardMask = (Bitboard{1} << kNumPoints) - 1;
Bitboard neighbors(Bitboard b);
/// Connected component of `seed` within `within`.
Bitboard flood(Bitboard seed, Bitboard within);
int count(Bitboard b);
inline constexpr Bitboard bit(int point) { return Bitboard{1} << point; }
}  // namespace bits

/// Liberties of the group containing `point` (empty set if the point is empty).
Bitboard group_liberties(const BoardState& s, int point);

using Player = std::function<Action(const BoardState&, Rng&)>;

/// Empty points whose orthogonal neighbours are all `c` stones and whose
/// diagonals are not controlled by the opponent (at most one hostile diagonal
/// in the centre, none on the edge).
Bitboard own_eyes(const BoardState& s, Color c);

/// Legal actions minus the side to move's own eyes. Pass is always set.
/// Every player, scripted or learned, chooses among these.
LegalMask move_mask(const BoardState& s);

/// Scripted players. Neither fills its own eyes; both pass when no other
/// legal board move remains.
/// Heuristic priorities: capture (largest first), escape atari to >= 2
/// liberties, then maximize own liberties gained plus opponent groups touched.
Action heuristic_opponent(const BoardState& s, Rng& rng);
/// Uniform over legal non-eye board points.
Action random_opponent(const BoardState& s, Rng& rng);

struct GameRecord {
    std::vector<BoardState> states;   // state before each move
    std::vector<Action> actions;      // move played from states[i]
    BoardState final_state;
    Score result;
};

/// Called with the state before each move and the move chosen from it.
using MoveObserver = std::function<void(const BoardState&, Action)>;

struct Outcome {
    Score result;
    int moves = 0;
    BoardState final_state;
};

/// Plays to termination (two passes or the move cap).
Outcome play_out(const Player& black, const Player& white, Rng& black_rng, Rng& white_rng,
                 const MoveObserver& observer = {}, BoardState start = new_game());

/// play_out that also keeps every intermediate state.
GameRecord play_game(const Player& black, const Player& white, Rng& black_rng, Rng& white_rng,
                     BoardState start = new_game());

/// Diagram parsing: 7 rows of {'.', 'X', 'O'} then a to-move line ("X" or "O").
/// Lines starting with '#' and blank lines are ignored.
BoardState parse_board(std::string_view text);
std::string format_board(const BoardState& s);

}  // namespace ct::go

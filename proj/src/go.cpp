#include "ct/go.hpp"

#include <algorithm>
#include <bit>

namespace ct::go {

namespace bits {

namespace {
constexpr Bitboard column_mask(int col) {
    Bitboard m = 0;
    for (int r = 0; r < kBoardSize; ++r) m |= Bitboard{1} << (r * kBoardSize + col);
    return m;
}
constexpr Bitboard kNotFirstCol = kBoardMask & ~column_mask(0);
constexpr Bitboard kNotLastCol = kBoardMask & ~column_mask(kBoardSize - 1);
}  // namespace

Bitboard neighbors(Bitboard b) {
    return (((b << 1) & kNotFirstCol) | ((b >> 1) & kNotLastCol) | (b << kBoardSize) | (b >> kBoardSize)) &
           kBoardMask;
}

Bitboard flood(Bitboard seed, Bitboard within) {
    Bitboard g = seed & within;
    if (g == 0) return 0;
    for (;;) {
        const Bitboard next = (g | neighbors(g)) & within;
        if (next == g) return g;
        g = next;
    }
}

int count(Bitboard b) { return std::popcount(b); }

}  // namespace bits

namespace {

inline int lowest_point(Bitboard b) { return std::countr_zero(b); }

struct Placement {
    std::optional<IllegalReason> illegal;
    Bitboard own = 0;
    Bitboard opp = 0;
    Bitboard captured = 0;
    Bitboard own_group = 0;
};

}  // namespace

// Rules has private access to BoardState.
class Rules {
public:
    static Placement simulate(const BoardState& s, int point) {
        Placement out;
        const Color me = s.to_move_;
        const Bitboard p = bits::bit(point);
        if ((s.black_ | s.white_) & p) {
            out.illegal = IllegalReason::Occupied;
            return out;
        }
        if (s.ko_point_ && *s.ko_point_ == point) {
            out.illegal = IllegalReason::Ko;
            return out;
        }
        Bitboard own = (me == Color::Black ? s.black_ : s.white_) | p;
        Bitboard opp = me == Color::Black ? s.white_ : s.black_;
        const Bitboard empty_after = bits::kBoardMask & ~(own | opp);
        Bitboard adjacent_opp = bits::neighbors(p) & opp;
        Bitboard captured = 0;
        while (adjacent_opp) {
            const Bitboard seed = adjacent_opp & (0 - adjacent_opp);
            const Bitboard grp = bits::flood(seed, opp);
            adjacent_opp &= ~grp;
            if ((bits::neighbors(grp) & empty_after) == 0) captured |= grp;
        }
        opp &= ~captured;
        const Bitboard empty = bits::kBoardMask & ~(own | opp);
        const Bitboard group = bits::flood(p, own);
        if ((bits::neighbors(group) & empty) == 0) {
            out.illegal = IllegalReason::Suicide;
            return out;
        }
        const PositionKey next = me == Color::Black ? PositionKey{own, opp} : PositionKey{opp, own};
        if (std::find(s.history_.begin(), s.history_.end(), next) != s.history_.end()) {
            out.illegal = IllegalReason::Superko;
            return out;
        }
        out.own = own;
        out.opp = opp;
        out.captured = captured;
        out.own_group = group;
        return out;
    }

    static void play_in_place(BoardState& s, Action a) {
        if (s.is_terminal()) throw IllegalMove(a, IllegalReason::Terminal);
        if (a.index < 0 || a.index > kPassIndex) throw std::out_of_range("action index out of range");
        if (a.is_pass()) {
            s.ko_point_.reset();
            ++s.consecutive_passes_;
        } else {
            const Placement pl = simulate(s, a.index);
            if (pl.illegal) throw IllegalMove(a, *pl.illegal);
            if (s.to_move_ == Color::Black) {
                s.black_ = pl.own;
                s.white_ = pl.opp;
            } else {
                s.white_ = pl.own;
                s.black_ = pl.opp;
            }
            s.ko_point_.reset();
            if (bits::count(pl.captured) == 1 && pl.own_group == bits::bit(a.index)) {
                const Bitboard libs = bits::neighbors(pl.own_group) & s.empty();
                if (libs == pl.captured) s.ko_point_ = lowest_point(pl.captured);
            }
            s.consecutive_passes_ = 0;
            s.history_.push_back(s.key());
        }
        s.to_move_ = opponent(s.to_move_);
        ++s.move_count_;
    }

    static BoardState make(Bitboard black, Bitboard white, Color to_move) {
        BoardState s;
        s.black_ = black & bits::kBoardMask;
        s.white_ = white & bits::kBoardMask & ~s.black_;
        s.to_move_ = to_move;
        s.history_ = {s.key()};
        return s;
    }
};

const char* color_name(Color c) {
    switch (c) {
        case Color::Black: return "black";
        case Color::White: return "white";
        default: return "empty";
    }
}

std::uint64_t PositionKey::hash() const {
    return mix64(black ^ mix64(white + 0x5bd1e995ULL));
}

const char* reason_name(IllegalReason r) {
    switch (r) {
        case IllegalReason::Occupied: return "occupied";
        case IllegalReason::Suicide: return "suicide";
        case IllegalReason::Ko: return "ko";
        case IllegalReason::Superko: return "superko";
        case IllegalReason::Terminal: return "terminal";
    }
    return "unknown";
}

IllegalMove::IllegalMove(Action a, IllegalReason reason)
    : std::runtime_error(std::string("illegal move (") + reason_name(reason) + ") at action " +
                         std::to_string(a.index)),
      action_(a),
      reason_(reason) {}

BoardState::BoardState() : history_{PositionKey{}} {}

BoardState BoardState::from_position(Bitboard black, Bitboard white, Color to_move) {
    return Rules::make(black, white, to_move);
}

Color BoardState::at(int point) const {
    const Bitboard p = bits::bit(point);
    if (black_ & p) return Color::Black;
    if (white_ & p) return Color::White;
    return Color::Empty;
}

Bitboard BoardState::empty() const { return bits::kBoardMask & ~(black_ | white_); }

BoardState new_game() { return BoardState{}; }

std::optional<IllegalReason> check_move(const BoardState& s, Action a) {
    if (s.is_terminal()) return IllegalReason::Terminal;
    if (a.is_pass()) return std::nullopt;
    return Rules::simulate(s, a.index).illegal;
}

LegalMask legal_mask(const BoardState& s) {
    if (s.is_terminal()) throw GameOver();
    LegalMask mask;
    mask.set(kPassIndex);
    for (int p = 0; p < kNumPoints; ++p)
        if (!Rules::simulate(s, p).illegal) mask.set(p);
    return mask;
}

BoardState apply(const BoardState& s, Action a) {
    BoardState next = s;
    Rules::play_in_place(next, a);
    return next;
}

Score area_score(const BoardState& s) {
    Score sc;
    sc.black = bits::count(s.stones(Color::Black));
    sc.white = bits::count(s.stones(Color::White));
    Bitboard empty = s.empty();
    while (empty) {
        const Bitboard seed = empty & (0 - empty);
        const Bitboard region = bits::flood(seed, s.empty());
        empty &= ~region;
        const Bitboard border = bits::neighbors(region);
        const bool touches_black = border & s.stones(Color::Black);
        const bool touches_white = border & s.stones(Color::White);
        if (touches_black && !touches_white) sc.black += bits::count(region);
        if (touches_white && !touches_black) sc.white += bits::count(region);
    }
    sc.white += kKomi;
    sc.winner = sc.black > sc.white ? Color::Black : Color::White;
    return sc;
}

Score score(const BoardState& s) {
    if (!s.is_terminal()) throw NotTerminal();
    return area_score(s);
}

Observation observe(const BoardState& s) {
    Observation o;
    const Bitboard mine = s.stones(s.to_move());
    const Bitboard theirs = s.stones(opponent(s.to_move()));
    for (int p = 0; p < kNumPoints; ++p) {
        const Bitboard b = bits::bit(p);
        const int plane = (mine & b) ? 0 : ((theirs & b) ? 1 : 2);
        o.planes[plane * kNumPoints + p] = 1.0f;
    }
    return o;
}

Bitboard group_liberties(const BoardState& s, int point) {
    const Color c = s.at(point);
    if (c == Color::Empty) return 0;
    const Bitboard grp = bits::flood(bits::bit(point), s.stones(c));
    return bits::neighbors(grp) & s.empty();
}

namespace {

Action pick(const std::vector<int>& points, Rng& rng) {
    return Action{points[static_cast<std::size_t>(rng.below(points.size()))]};
}

/// Points maximizing `value` among `candidates`; ties kept in ascending order.
template <class F>
std::vector<int> argmax_points(Bitboard candidates, F value) {
    std::vector<int> best;
    int best_value = 0;
    while (candidates) {
        const int p = lowest_point(candidates);
        candidates &= candidates - 1;
        const int v = value(p);
        if (best.empty() || v > best_value) {
            best_value = v;
            best.assign(1, p);
        } else if (v == best_value) {
            best.push_back(p);
        }
    }
    return best;
}

Bitboard legal_points(const BoardState& s) {
    const LegalMask mask = legal_mask(s);
    Bitboard b = 0;
    for (int p = 0; p < kNumPoints; ++p)
        if (mask[p]) b |= bits::bit(p);
    return b;
}

// Legal points the scripted players consider: everything except filling one
// of their own eyes.
Bitboard candidate_points(const BoardState& s) { return legal_points(s) & ~own_eyes(s, s.to_move()); }

}  // namespace

Bitboard own_eyes(const BoardState& s, Color c) {
    const Bitboard mine = s.stones(c);
    const Bitboard theirs = s.stones(opponent(c));
    const Bitboard empty = s.empty();
    Bitboard eyes = 0;
    for (int p = 0; p < kNumPoints; ++p) {
        const Bitboard b = bits::bit(p);
        if (!(empty & b) || (bits::neighbors(b) & ~mine)) continue;
        const int r = p / kBoardSize, col = p % kBoardSize;
        int diagonals = 0, hostile = 0;
        for (int dr : {-1, 1})
            for (int dc : {-1, 1}) {
                const int rr = r + dr, cc = col + dc;
                if (rr < 0 || rr >= kBoardSize || cc < 0 || cc >= kBoardSize) continue;
                ++diagonals;
                if (theirs & bits::bit(rr * kBoardSize + cc)) ++hostile;
            }
        // A centre point tolerates one hostile diagonal, an edge or corner point none.
        if (hostile < (diagonals == 4 ? 2 : 1)) eyes |= b;
    }
    return eyes;
}

LegalMask move_mask(const BoardState& s) {
    LegalMask mask = legal_mask(s);
    const Bitboard eyes = own_eyes(s, s.to_move());
    for (int p = 0; p < kNumPoints; ++p)
        if (eyes & bits::bit(p)) mask[p] = false;
    return mask;
}

Action heuristic_opponent(const BoardState& s, Rng& rng) {
    const Bitboard legal = candidate_points(s);
    if (legal == 0) return Action::pass();
    const Color me = s.to_move();
    const Bitboard mine = s.stones(me);
    const Bitboard theirs = s.stones(opponent(me));
    const Bitboard empty = s.empty();

    // 1. Capture an opponent group in atari; prefer the largest capture.
    Bitboard capture_points = 0;
    {
        Bitboard rest = theirs;
        while (rest) {
            const Bitboard grp = bits::flood(rest & (0 - rest), theirs);
            rest &= ~grp;
            const Bitboard libs = bits::neighbors(grp) & empty;
            if (bits::count(libs) == 1 && (libs & legal)) capture_points |= libs;
        }
    }
    if (capture_points) {
        const auto best = argmax_points(capture_points, [&](int p) {
            return bits::count(Rules::simulate(s, p).captured);
        });
        return pick(best, rng);
    }

    // 2. Escape own atari by extending to the last liberty.
    Bitboard escape_points = 0;
    {
        Bitboard rest = mine;
        while (rest) {
            const Bitboard grp = bits::flood(rest & (0 - rest), mine);
            rest &= ~grp;
            const Bitboard libs = bits::neighbors(grp) & empty;
            if (bits::count(libs) != 1 || !(libs & legal)) continue;
            const int p = lowest_point(libs);
            const Placement pl = Rules::simulate(s, p);
            const Bitboard new_libs = bits::neighbors(pl.own_group) & ~(pl.own | pl.opp) & bits::kBoardMask;
            if (bits::count(new_libs) >= 2) escape_points |= libs;
        }
    }
    if (escape_points) {
        const auto best = argmax_points(escape_points, [&](int p) {
            const Placement pl = Rules::simulate(s, p);
            return bits::count(bits::neighbors(pl.own_group) & ~(pl.own | pl.opp) & bits::kBoardMask);
        });
        return pick(best, rng);
    }

    // 3. Own liberties gained plus opponent liberties removed.
    const auto best = argmax_points(legal, [&](int p) {
        const Placement pl = Rules::simulate(s, p);
        const Bitboard empty_after = bits::kBoardMask & ~(pl.own | pl.opp);
        const int libs_after = bits::count(bits::neighbors(pl.own_group) & empty_after);
        int libs_before = 0;
        Bitboard adj_own = bits::neighbors(bits::bit(p)) & mine;
        while (adj_own) {
            const Bitboard grp = bits::flood(adj_own & (0 - adj_own), mine);
            adj_own &= ~grp;
            libs_before += bits::count(bits::neighbors(grp) & empty);
        }
        int opp_groups_touched = 0;
        Bitboard adj_opp = bits::neighbors(bits::bit(p)) & theirs;
        while (adj_opp) {
            const Bitboard grp = bits::flood(adj_opp & (0 - adj_opp), theirs);
            adj_opp &= ~grp;
            ++opp_groups_touched;
        }
        return libs_after - libs_before + opp_groups_touched;
    });
    return pick(best, rng);
}

Action random_opponent(const BoardState& s, Rng& rng) {
    Bitboard legal = candidate_points(s);
    if (legal == 0) return Action::pass();
    std::vector<int> points;
    while (legal) {
        points.push_back(lowest_point(legal));
        legal &= legal - 1;
    }
    return pick(points, rng);
}

Outcome play_out(const Player& black, const Player& white, Rng& black_rng, Rng& white_rng,
                 const MoveObserver& observer, BoardState start) {
    BoardState s = std::move(start);
    int moves = 0;
    while (!s.is_terminal()) {
        const bool black_to_move = s.to_move() == Color::Black;
        const Action a = black_to_move ? black(s, black_rng) : white(s, white_rng);
        if (observer) observer(s, a);
        Rules::play_in_place(s, a);
        ++moves;
    }
    Outcome out;
    out.result = area_score(s);
    out.moves = moves;
    out.final_state = std::move(s);
    return out;
}

GameRecord play_game(const Player& black, const Player& white, Rng& black_rng, Rng& white_rng,
                     BoardState start) {
    GameRecord rec;
    Outcome out = play_out(
        black, white, black_rng, white_rng,
        [&](const BoardState& s, Action a) {
            rec.states.push_back(s);
            rec.actions.push_back(a);
        },
        std::move(start));
    rec.result = out.result;
    rec.final_state = std::move(out.final_state);
    return rec;
}

}  // namespace ct::go

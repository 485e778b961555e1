#pragma once

// Shared by the unit tests and the acceptance binary: the board fixture
// runner, the rules invariant checker, and independent reference oracles.

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ct/alignment.hpp"
#include "ct/go.hpp"

namespace ct::testing {

namespace fs = std::filesystem;

inline fs::path fixture_dir() { return fs::path(CT_FIXTURE_DIR); }

// ---------------------------------------------------------------- fixtures

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline std::optional<go::IllegalReason> reason_from(const std::string& s) {
    if (s == "occupied") return go::IllegalReason::Occupied;
    if (s == "suicide") return go::IllegalReason::Suicide;
    if (s == "ko") return go::IllegalReason::Ko;
    if (s == "superko") return go::IllegalReason::Superko;
    if (s == "terminal") return go::IllegalReason::Terminal;
    return std::nullopt;
}

inline std::string stones_only(const std::string& formatted) {
    return formatted.substr(0, formatted.rfind('\n', formatted.size() - 2) + 1);
}

/// Runs one fixture file. Returns a list of mismatches (empty on success).
///
/// File layout: the 8-line board diagram accepted by go::parse_board, then
/// one command per line:
///   play R C | play pass        the move must be legal; it is applied
///   illegal R C REASON          check_move reports REASON
///   legal R C                   check_move reports no reason
///   captured N                  stones removed by the last play
///   ko R C | ko none            ko point of the current state
///   board + 7 rows              stones of the current state
///   score B W                   area score including komi
///   winner black|white
///   terminal yes|no
///   eye R C | not_eye R C       own_eyes of the side to move
///   masked R C                  excluded from move_mask although legal
inline std::vector<std::string> run_fixture(const fs::path& path) {
    std::vector<std::string> errors;
    std::istringstream in(read_file(path));
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line[0] == '#') continue;
        lines.push_back(line);
    }
    if (lines.size() < 8) return {"too few lines"};
    std::string diagram;
    for (int i = 0; i < 8; ++i) diagram += lines[static_cast<std::size_t>(i)] + "\n";
    go::BoardState s = go::parse_board(diagram);
    int last_captured = 0;
    auto fail = [&](const std::string& cmd, const std::string& what) { errors.push_back(cmd + ": " + what); };

    for (std::size_t i = 8; i < lines.size(); ++i) {
        const std::string& cmd = lines[i];
        std::istringstream ls(cmd);
        std::string op;
        ls >> op;
        auto point = [&]() {
            int r = -1, c = -1;
            ls >> r >> c;
            return go::Action::at(r, c);
        };
        if (op == "play") {
            std::string first;
            ls >> first;
            go::Action a = go::Action::pass();
            if (first != "pass") {
                int c = -1;
                ls >> c;
                a = go::Action::at(std::stoi(first), c);
            }
            if (const auto why = go::check_move(s, a)) {
                fail(cmd, std::string("unexpectedly illegal (") + go::reason_name(*why) + ")");
                return errors;
            }
            const go::Color victim = go::opponent(s.to_move());
            const int before = go::bits::count(s.stones(victim));
            s = go::apply(s, a);
            last_captured = before - go::bits::count(s.stones(victim));
        } else if (op == "illegal") {
            const go::Action a = point();
            std::string reason;
            ls >> reason;
            const auto got = go::check_move(s, a);
            if (!got) fail(cmd, "move is legal");
            else if (got != reason_from(reason)) fail(cmd, std::string("reason is ") + go::reason_name(*got));
        } else if (op == "legal") {
            const auto got = go::check_move(s, point());
            if (got) fail(cmd, std::string("illegal (") + go::reason_name(*got) + ")");
        } else if (op == "captured") {
            int n = -1;
            ls >> n;
            if (n != last_captured) fail(cmd, "captured " + std::to_string(last_captured));
        } else if (op == "ko") {
            std::string first;
            ls >> first;
            std::optional<int> want;
            if (first != "none") {
                int c = -1;
                ls >> c;
                want = std::stoi(first) * go::kBoardSize + c;
            }
            if (s.ko_point() != want)
                fail(cmd, "ko point is " + (s.ko_point() ? std::to_string(*s.ko_point()) : std::string("none")));
        } else if (op == "board") {
            std::string want;
            for (int r = 0; r < go::kBoardSize && i + 1 < lines.size(); ++r) want += lines[++i] + "\n";
            const std::string got = stones_only(go::format_board(s));
            if (got != want) fail(cmd, "board is\n" + got);
        } else if (op == "score") {
            double b = 0, w = 0;
            ls >> b >> w;
            const go::Score sc = go::area_score(s);
            if (sc.black != b || sc.white != w)
                fail(cmd, "score is " + std::to_string(sc.black) + " " + std::to_string(sc.white));
        } else if (op == "winner") {
            std::string who;
            ls >> who;
            if (who != go::color_name(go::area_score(s).winner)) fail(cmd, "wrong winner");
        } else if (op == "terminal") {
            std::string yes;
            ls >> yes;
            if (s.is_terminal() != (yes == "yes")) fail(cmd, "wrong terminal flag");
        } else if (op == "eye" || op == "not_eye") {
            const go::Action a = point();
            const bool eye = go::own_eyes(s, s.to_move()) & go::bits::bit(a.index);
            if (eye != (op == "eye")) fail(cmd, "wrong eye status");
        } else if (op == "masked") {
            const go::Action a = point();
            if (go::move_mask(s)[static_cast<std::size_t>(a.index)]) fail(cmd, "point is in move_mask");
        } else {
            fail(cmd, "unknown command");
        }
    }
    return errors;
}

inline std::vector<fs::path> fixture_files() {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(fixture_dir() / "boards"))
        if (e.path().extension() == ".txt") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    return files;
}

// --------------------------------------------------------------- invariants

inline void check_groups_have_liberties(const go::BoardState& s, std::vector<std::string>& errors) {
    for (go::Color c : {go::Color::Black, go::Color::White}) {
        go::Bitboard rest = s.stones(c);
        while (rest) {
            const go::Bitboard g = go::bits::flood(rest & (0 - rest), s.stones(c));
            rest &= ~g;
            if ((go::bits::neighbors(g) & s.empty()) == 0) errors.push_back("group without liberties");
        }
    }
}

/// Checks one transition `before -a-> after` against the rules. Appends
/// messages to `errors`.
inline void check_transition(const go::BoardState& before, go::Action a, const go::BoardState& after,
                             std::vector<std::string>& errors) {
    using namespace go;
    const Color me = before.to_move(), them = opponent(me);
    if (before.stones(Color::Black) & before.stones(Color::White)) errors.push_back("overlapping stones");
    if ((before.stones(Color::Black) | before.stones(Color::White)) & ~bits::kBoardMask)
        errors.push_back("stone off the board");
    const LegalMask mask = legal_mask(before);
    if (!mask[kPassIndex]) errors.push_back("pass not legal");
    for (int p = 0; p < kNumPoints; ++p) {
        const bool legal = !check_move(before, Action{p});
        if (legal != mask[static_cast<std::size_t>(p)]) errors.push_back("legal_mask disagrees with check_move");
        if (legal && !(before.empty() & bits::bit(p))) errors.push_back("occupied point marked legal");
    }
    const LegalMask mm = move_mask(before);
    if ((mm & ~mask).any()) errors.push_back("move_mask outside legal_mask");
    if (before.ko_point()) {
        if (!(before.empty() & bits::bit(*before.ko_point()))) errors.push_back("ko point occupied");
        if (check_move(before, Action{*before.ko_point()}) != IllegalReason::Ko) errors.push_back("ko point playable");
    }
    if (after.move_count() != before.move_count() + 1) errors.push_back("move count not incremented");
    if (after.to_move() != them) errors.push_back("side to move not swapped");
    if (a.is_pass()) {
        if (after.key() != before.key()) errors.push_back("pass changed the board");
        if (after.ko_point()) errors.push_back("ko point survives a pass");
        if (after.consecutive_passes() != before.consecutive_passes() + 1) errors.push_back("pass not counted");
        if (after.history().size() != before.history().size()) errors.push_back("pass extended history");
    } else {
        const Bitboard p = bits::bit(a.index);
        if ((after.stones(me) & ~before.stones(me)) != p) errors.push_back("placement wrong");
        if (before.stones(me) & ~after.stones(me)) errors.push_back("own stone removed");
        if (after.stones(them) & ~before.stones(them)) errors.push_back("opponent stone added");
        const Bitboard removed = before.stones(them) & ~after.stones(them);
        // Every removed stone belonged to a group that the move left without liberties.
        go::Bitboard rest = removed;
        while (rest) {
            const Bitboard g = bits::flood(rest & (0 - rest), before.stones(them));
            rest &= ~g;
            if ((g & removed) != g) errors.push_back("partial group capture");
            if (bits::neighbors(g) & (before.empty() & ~p)) errors.push_back("captured group had liberties");
        }
        if (after.consecutive_passes() != 0) errors.push_back("pass counter not reset");
        const auto& h = before.history();
        if (std::find(h.begin(), h.end(), after.key()) != h.end()) errors.push_back("position repeated");
        if (after.history().size() != h.size() + 1 || after.history().back() != after.key())
            errors.push_back("history not extended");
    }
    check_groups_have_liberties(after, errors);
    if (after.is_terminal() != (after.consecutive_passes() >= 2 || after.move_count() >= kMoveCap))
        errors.push_back("terminal flag wrong");
    const Score sc = area_score(after);
    if (sc.black + sc.white - kKomi > kNumPoints + 1e-9) errors.push_back("score exceeds board area");
}

/// Uniform over every legal action, pass included, eye filling included.
inline go::Action uniform_legal(const go::BoardState& s, Rng& rng) {
    const go::LegalMask m = go::legal_mask(s);
    std::vector<int> idx;
    for (int i = 0; i < go::kNumActions; ++i)
        if (m[static_cast<std::size_t>(i)]) idx.push_back(i);
    return go::Action{idx[rng.below(idx.size())]};
}

struct FuzzResult {
    long games = 0;
    long moves = 0;
    long capped = 0;
    std::vector<std::string> errors;
};

/// Random-vs-random games with every transition checked. Even games use the
/// eye-respecting random player, odd games pick uniformly among all legal
/// actions so that ko fights and eye filling are exercised too.
inline FuzzResult fuzz_games(int n_games, std::uint64_t seed) {
    FuzzResult out;
    for (int g = 0; g < n_games; ++g) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(g)}));
        go::BoardState s = go::new_game();
        while (!s.is_terminal()) {
            const go::Action a = g % 2 == 0 ? go::random_opponent(s, rng) : uniform_legal(s, rng);
            const go::BoardState next = go::apply(s, a);
            check_transition(s, a, next, out.errors);
            s = next;
            ++out.moves;
        }
        if (s.move_count() >= go::kMoveCap) ++out.capped;
        const go::Score sc = go::score(s);
        if ((sc.winner == go::Color::Black) != (sc.black > sc.white)) out.errors.push_back("winner mismatch");
        ++out.games;
        if (out.errors.size() > 20) break;
    }
    return out;
}

// ------------------------------------------------------------------ oracles

/// Minimum assignment cost by enumerating every permutation.
inline double brute_force_assignment(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += cost(i, perm[static_cast<std::size_t>(i)]);
        best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

inline double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& columns) {
    double c = 0.0;
    for (std::size_t i = 0; i < columns.size(); ++i) c += cost(static_cast<Eigen::Index>(i), columns[i]);
    return c;
}

using Big = boost::multiprecision::cpp_bin_float_50;

/// Two-sided binomial p-value by exact summation in 50-digit arithmetic.
/// Outcomes within a relative 1e-7 of the observed probability count as ties.
inline double binomial_oracle(long k, long n, double p0) {
    const Big p(p0), q = Big(1) - Big(p0);
    std::vector<Big> pmf(static_cast<std::size_t>(n + 1));
    Big choose = 1;
    for (long i = 0; i <= n; ++i) {
        if (i > 0) choose = choose * (n - i + 1) / i;
        pmf[static_cast<std::size_t>(i)] = choose * pow(p, i) * pow(q, n - i);
    }
    const Big limit = pmf[static_cast<std::size_t>(k)] * Big(1.0000001);
    Big total = 0;
    for (const Big& x : pmf)
        if (x <= limit) total += x;
    return std::min(1.0, static_cast<double>(total));
}

/// Two-sided Student t p-value I_x(df/2, 1/2), x = df / (df + t^2), from the
/// incomplete beta integral evaluated by tanh-sinh quadrature in 50 digits.
inline double t_two_sided_oracle(double t, double df) {
    const Big a = Big(df) / 2, b = Big(1) / 2;
    const Big x = Big(df) / (Big(df) + Big(t) * Big(t));
    boost::math::quadrature::tanh_sinh<Big> integrator;
    auto f = [&](const Big& s) { return pow(s, a - 1) / sqrt(Big(1) - s); };
    const Big partial = integrator.integrate(f, Big(0), x);
    const Big beta = boost::multiprecision::tgamma(a) * boost::multiprecision::tgamma(b) /
                     boost::multiprecision::tgamma(a + b);
    return static_cast<double>(partial / beta);
}

}  // namespace ct::testing

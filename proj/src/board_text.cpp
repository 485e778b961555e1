#include <sstream>

#include "ct/go.hpp"

namespace ct::go {

namespace {
std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}
}  // namespace

BoardState parse_board(std::string_view text) {
    std::vector<std::string_view> lines;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty() || line.front() == '#') continue;
        lines.push_back(line);
    }
    if (lines.size() != kBoardSize + 1)
        throw std::invalid_argument("board diagram needs 7 rows and a to-move line, got " +
                                    std::to_string(lines.size()) + " lines");
    Bitboard black = 0, white = 0;
    for (int r = 0; r < kBoardSize; ++r) {
        const auto row = lines[r];
        if (row.size() != kBoardSize)
            throw std::invalid_argument("board row " + std::to_string(r) + " must have 7 characters");
        for (int c = 0; c < kBoardSize; ++c) {
            const Bitboard b = bits::bit(r * kBoardSize + c);
            switch (row[c]) {
                case '.': break;
                case 'X': black |= b; break;
                case 'O': white |= b; break;
                default:
                    throw std::invalid_argument(std::string("unexpected board character '") + row[c] + "'");
            }
        }
    }
    const auto to_move = lines[kBoardSize];
    if (to_move != "X" && to_move != "O") throw std::invalid_argument("to-move line must be X or O");
    return BoardState::from_position(black, white, to_move == "X" ? Color::Black : Color::White);
}

std::string format_board(const BoardState& s) {
    std::ostringstream os;
    for (int r = 0; r < kBoardSize; ++r) {
        for (int c = 0; c < kBoardSize; ++c) {
            const Color col = s.at(r, c);
            os << (col == Color::Black ? 'X' : (col == Color::White ? 'O' : '.'));
        }
        os << '\n';
    }
    os << (s.to_move() == Color::Black ? 'X' : 'O') << '\n';
    return os.str();
}

}  // namespace ct::go

#include "festcircuit/text.hpp"

#include <cctype>
#include <cstdint>

namespace festcircuit::text {

namespace {

bool is_space_cp(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' ||
           cp == U'\v' || cp == 0x00A0;
}

bool is_terminal_punct_cp(char32_t cp) {
    switch (cp) {
    case U'.': case U',': case U';': case U':': case U'!': case U'?':
    case U'"': case U'\'': case U'`':
    case 0x00B4:            // acute accent
    case 0x00AB: case 0x00BB: // guillemets
    case 0x2018: case 0x2019: case 0x201C: case 0x201D:
    case 0x2026:            // ellipsis
    case U'-': case 0x2013: case 0x2014:
        return true;
    default:
        return false;
    }
}

// Case folding for ASCII, Latin-1 supplement and Latin Extended-A; other
// codepoints pass through unchanged.
char32_t fold_cp(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') return cp + 32;
    if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 32;
    if (cp >= 0x0100 && cp <= 0x017F) {
        if (cp == 0x0130) return U'i'; // dotted capital I
        if (cp == 0x0178) return 0x00FF;
        if (cp >= 0x0139 && cp <= 0x0148) return (cp % 2 == 1) ? cp + 1 : cp;
        if (cp >= 0x0179 && cp <= 0x017E) return (cp % 2 == 1) ? cp + 1 : cp;
        return (cp % 2 == 0) ? cp + 1 : cp;
    }
    return cp;
}

std::vector<char32_t> decode_utf8(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto b0 = static_cast<unsigned char>(s[i]);
        char32_t cp = 0;
        std::size_t len = 1;
        if (b0 < 0x80) {
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            len = 2;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            len = 3;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            len = 4;
        } else {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        if (i + len > s.size()) {
            out.push_back(0xFFFD);
            break;
        }
        bool valid = true;
        for (std::size_t k = 1; k < len; ++k) {
            const auto bk = static_cast<unsigned char>(s[i + k]);
            if ((bk & 0xC0) != 0x80) {
                valid = false;
                break;
            }
            cp = (cp << 6) | (bk & 0x3F);
        }
        if (!valid) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

void encode_utf8(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

} // namespace

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string> split_list(std::string_view s, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t pos = s.find(delim, start);
        const std::string_view piece =
            (pos == std::string_view::npos) ? s.substr(start) : s.substr(start, pos - start);
        std::string t = trim(piece);
        if (!t.empty()) out.push_back(std::move(t));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string normalize_title(std::string_view raw) {
    std::vector<char32_t> cps = decode_utf8(raw);
    for (char32_t& cp : cps) cp = fold_cp(cp);

    std::vector<char32_t> collapsed;
    collapsed.reserve(cps.size());
    bool pending_space = false;
    for (char32_t cp : cps) {
        if (is_space_cp(cp)) {
            pending_space = !collapsed.empty();
            continue;
        }
        if (pending_space) {
            collapsed.push_back(U' ');
            pending_space = false;
        }
        collapsed.push_back(cp);
    }
    while (!collapsed.empty() &&
           (is_terminal_punct_cp(collapsed.back()) || collapsed.back() == U' ')) {
        collapsed.pop_back();
    }
    std::size_t lead = 0;
    while (lead < collapsed.size() &&
           (is_terminal_punct_cp(collapsed[lead]) || collapsed[lead] == U' ')) {
        ++lead;
    }
    collapsed.erase(collapsed.begin(), collapsed.begin() + static_cast<std::ptrdiff_t>(lead));

    std::string out;
    out.reserve(collapsed.size());
    for (char32_t cp : collapsed) encode_utf8(cp, out);
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace festcircuit::text

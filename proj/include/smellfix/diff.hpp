#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

namespace smellfix {

namespace detail {

inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    if (!text.empty() && text.back() == '\n') lines.push_back({});
    return lines;
}

}  // namespace detail

/// Line-based unified diff with the usual three lines of context. LCS over
/// the middle after trimming the common prefix/suffix; big inputs fall back
/// to a single replace hunk.
inline std::string unified_diff(std::string_view old_text, std::string_view new_text,
                                std::string_view old_label, std::string_view new_label,
                                int context = 3) {
    if (old_text == new_text) return {};
    std::vector<std::string_view> a = detail::split_lines(old_text);
    std::vector<std::string_view> b = detail::split_lines(new_text);

    std::size_t prefix = 0;
    while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
    std::size_t suffix = 0;
    while (suffix < a.size() - prefix && suffix < b.size() - prefix &&
           a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix])
        ++suffix;

    const std::size_t am = a.size() - prefix - suffix;
    const std::size_t bm = b.size() - prefix - suffix;

    // ops over the middle: -1 delete from a, +1 insert from b, 0 match
    struct Op {
        int tag;
        std::size_t ai, bi;
    };
    std::vector<Op> ops;
    if (am * bm <= 4'000'000) {
        std::vector<std::vector<unsigned>> lcs(am + 1, std::vector<unsigned>(bm + 1, 0));
        for (std::size_t i = am; i-- > 0;)
            for (std::size_t j = bm; j-- > 0;)
                lcs[i][j] = a[prefix + i] == b[prefix + j]
                                ? lcs[i + 1][j + 1] + 1
                                : std::max(lcs[i + 1][j], lcs[i][j + 1]);
        std::size_t i = 0, j = 0;
        while (i < am && j < bm) {
            if (a[prefix + i] == b[prefix + j]) {
                ops.push_back({0, prefix + i++, prefix + j++});
            } else if (lcs[i + 1][j] >= lcs[i][j + 1]) {
                ops.push_back({-1, prefix + i++, 0});
            } else {
                ops.push_back({+1, 0, prefix + j++});
            }
        }
        while (i < am) ops.push_back({-1, prefix + i++, 0});
        while (j < bm) ops.push_back({+1, 0, prefix + j++});
    } else {
        for (std::size_t i = 0; i < am; ++i) ops.push_back({-1, prefix + i, 0});
        for (std::size_t j = 0; j < bm; ++j) ops.push_back({+1, 0, prefix + j});
    }

    // rebuild the full op list with context rows
    std::vector<Op> all;
    for (std::size_t i = 0; i < prefix; ++i) all.push_back({0, i, i});
    all.insert(all.end(), ops.begin(), ops.end());
    for (std::size_t k = 0; k < suffix; ++k)
        all.push_back({0, a.size() - suffix + k, b.size() - suffix + k});

    std::string out;
    out += "--- ";
    out += old_label;
    out += "\n+++ ";
    out += new_label;
    out += '\n';

    std::size_t idx = 0;
    while (idx < all.size()) {
        if (all[idx].tag == 0) {
            ++idx;
            continue;
        }
        std::size_t lo = idx, hi = idx;
        while (hi + 1 < all.size()) {
            // join changes whose gap of matches fits inside 2*context
            std::size_t probe = hi + 1, matches = 0;
            while (probe < all.size() && all[probe].tag == 0) {
                ++matches;
                ++probe;
            }
            if (probe < all.size() && matches <= static_cast<std::size_t>(2 * context))
                hi = probe;
            else
                break;
        }
        const std::size_t ctx_lo = lo >= static_cast<std::size_t>(context)
                                       ? lo - context
                                       : 0;
        std::size_t ctx_hi = std::min(all.size() - 1, hi + context);

        std::size_t a_start = 0, b_start = 0, a_count = 0, b_count = 0;
        bool started = false;
        for (std::size_t k = ctx_lo; k <= ctx_hi; ++k) {
            const Op& op = all[k];
            if (!started) {
                a_start = op.tag == +1 ? (k ? all[k - 1].ai + 1 : 0) : op.ai;
                b_start = op.tag == -1 ? (k ? all[k - 1].bi + 1 : 0) : op.bi;
                started = true;
            }
            if (op.tag != +1) ++a_count;
            if (op.tag != -1) ++b_count;
        }
        out += "@@ -" + std::to_string(a_count ? a_start + 1 : a_start) + "," +
               std::to_string(a_count) + " +" +
               std::to_string(b_count ? b_start + 1 : b_start) + "," +
               std::to_string(b_count) + " @@\n";
        for (std::size_t k = ctx_lo; k <= ctx_hi; ++k) {
            const Op& op = all[k];
            if (op.tag == 0) {
                out += ' ';
                out += a[op.ai];
            } else if (op.tag == -1) {
                out += '-';
                out += a[op.ai];
            } else {
                out += '+';
                out += b[op.bi];
            }
            out += '\n';
        }
        idx = ctx_hi + 1;
    }
    return out;
}

}  // namespace smellfix

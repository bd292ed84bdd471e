// estimator.cpp - HEOM resource arithmetic

#include "bathsmith/estimator.hpp"

#include <cstdio>

namespace bathsmith {

std::uint64_t absorption_block_entries(std::uint64_t n_sites) { return n_sites; }

BigInt heom_count(const HeomCostQuery& q) {
    const BigInt k = BigInt(2) * q.n_sites * q.n_lorentzians;
    BigInt c = 1;
    // C(k + L, L) built incrementally; each partial product is itself a binomial
    for (std::uint64_t i = 1; i <= q.depth; ++i) c = c * (k + i) / i;
    return c;
}

BigInt heom_memory(const HeomCostQuery& q) {
    const std::uint64_t block = q.block_entries ? q.block_entries : absorption_block_entries(q.n_sites);
    return heom_count(q) * block * q.bytes_per_entry;
}

std::string human_bytes(const BigInt& bytes) {
    static const char* units[] = {"B", "kB", "MB", "GB", "TB", "PB", "EB", "ZB", "YB"};
    double v = bytes.convert_to<double>();
    int u = 0;
    while (v >= 1000.0 && u < 8) {
        v /= 1000.0;
        ++u;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, u == 0 ? "%.0f %s" : "%.3g %s", v, units[u]);
    return buf;
}

std::string group_digits(const BigInt& v) {
    std::string s = v.str();
    std::string out;
    const bool neg = !s.empty() && s[0] == '-';
    if (neg) s.erase(0, 1);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i > 0 && (s.size() - i) % 3 == 0) out += ',';
        out += s[i];
    }
    return neg ? "-" + out : out;
}

} // namespace bathsmith

// estimator.hpp - HEOM auxiliary-operator counts and memory footprints

#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace bathsmith {

using BigInt = boost::multiprecision::cpp_int;

struct HeomCostQuery {
    std::uint64_t n_sites = 2;        // N
    std::uint64_t n_lorentzians = 6;  // M per site
    std::uint64_t depth = 5;          // L
    std::uint64_t block_entries = 0;  // complex entries per operator, 0 = absorption convention
    std::uint64_t bytes_per_entry = 16;
};

// Absorption keeps the ground-state column of the single-excitation block: N entries.
std::uint64_t absorption_block_entries(std::uint64_t n_sites);

// (2NM + L)! / ((2NM)! L!), exact.
BigInt heom_count(const HeomCostQuery& q);

// count * block * bytes_per_entry, exact.
BigInt heom_memory(const HeomCostQuery& q);

// Decimal units (kB = 1e3 B), three significant digits.
std::string human_bytes(const BigInt& bytes);

// Digits with thousands separators.
std::string group_digits(const BigInt& v);

} // namespace bathsmith

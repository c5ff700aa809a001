// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#ifndef C2E_NUM_FORMAT_HPP
#define C2E_NUM_FORMAT_HPP

#include <charconv>
#include <string>

namespace c2e {

/// Shortest decimal that round-trips the double.
inline std::string format_shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace c2e

#endif  // C2E_NUM_FORMAT_HPP

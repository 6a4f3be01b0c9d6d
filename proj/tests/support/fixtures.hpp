#pragma once

#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "smpx/smpx.hpp"

namespace smpx::testing {

inline std::string sample_path(const std::string& name) { return std::string(SMPX_SAMPLES_DIR) + "/" + name; }

inline std::string read_sample(const std::string& name) {
  std::ifstream in(sample_path(name));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline PerturbedSMP load_sample(const std::string& name) { return parse_model(read_sample(name)); }

inline Rational q(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Expansion ex(int low, std::vector<Rational> c) { return Expansion(low, std::move(c)); }

inline void expect_error(ErrorKind kind, const std::function<void()>& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace smpx::testing

#pragma once

// Text of config/default.conf and patterns/default.json, baked in at
// configure time (see embedded.cpp.in).

namespace rnr::embedded {

extern const char* const kDefaultConfig;
extern const char* const kDefaultPattern;

}  // namespace rnr::embedded

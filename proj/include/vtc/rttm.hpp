// Copyright (c) 2026 The voicetype authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VTC_RTTM_HPP_
#define VTC_RTTM_HPP_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "vtc/annotation.hpp"

namespace vtc {

// RTTM line format, whitespace separated:
//   SPEAKER <uri> <chan> <onset> <duration> <NA> <NA> <label> <NA> <NA>
// Unknown labels map to UNK; zero or negative durations are rejected.
// Returns one annotation per distinct URI, in order of first appearance.
std::vector<Annotation> parse_rttm(std::istream& in);
std::vector<Annotation> parse_rttm_file(const std::string& path);

void serialize_rttm(std::ostream& out, const Annotation& a);
void serialize_rttm(std::ostream& out, const std::vector<Annotation>& as);
void write_rttm_file(const std::string& path, const Annotation& a);

// UEM line format: <uri> <chan> <onset> <offset>
// Returns merged scoring regions per URI.
std::map<std::string, std::vector<Segment>> parse_uem(std::istream& in);
std::map<std::string, std::vector<Segment>> parse_uem_file(
    const std::string& path);

// Fixed-point rendering of a time value with at least 3 decimals, using
// the fewest decimals (up to 9) that parse back to the same double.
std::string format_time(double seconds);

}  // namespace vtc

#endif  // VTC_RTTM_HPP_

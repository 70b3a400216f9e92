// maskbench/error.hpp

// Copyright 2026  maskbench authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef MASKBENCH_ERROR_HPP_
#define MASKBENCH_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace maskbench {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed container or archive contents (bad magic, header mismatch).
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

// Well-formed container holding an encoding we refuse to read (stereo,
// non-PCM16). Distinct from FormatError so callers can tell "broken file"
// from "valid file we do not resample or downmix".
class UnsupportedFormatError : public FormatError {
 public:
  explicit UnsupportedFormatError(const std::string& msg) : FormatError(msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

// Text inputs that fail to parse; message carries the line number.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Tensor or vector dimensions that do not agree.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// Inputs that are individually well-formed but mutually inconsistent
// (token/timing mismatch, mask plan outside the waveform, bad indices).
class ConsistencyError : public Error {
 public:
  explicit ConsistencyError(const std::string& msg) : Error(msg) {}
};

class TrainingError : public Error {
 public:
  TrainingError(const std::string& msg, int epoch) : Error(msg), epoch(epoch) {}
  int epoch;
};

}  // namespace maskbench

#endif  // MASKBENCH_ERROR_HPP_

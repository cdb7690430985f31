// Copyright 2026 The riskenv Authors
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

#ifndef RISKENV_ERROR_HPP_
#define RISKENV_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace riskenv
{

/// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kValidation = 3,
  kNumerical = 4,
};

class Error : public std::runtime_error
{
public:
  Error(ExitCode code, std::string kind, const std::string & message)
  : std::runtime_error(message), code_(code), kind_(std::move(kind))
  {
  }

  ExitCode code() const { return code_; }
  const std::string & kind() const { return kind_; }

private:
  ExitCode code_;
  std::string kind_;
};

/// Malformed input: schema violations, broken invariants, missing files.
class ValidationError : public Error
{
public:
  explicit ValidationError(const std::string & message)
  : Error(ExitCode::kValidation, "validation", message)
  {
  }
};

/// A value outside its documented range (risk levels, window bounds, ...).
class RangeError : public Error
{
public:
  explicit RangeError(const std::string & message) : Error(ExitCode::kValidation, "range", message)
  {
  }
};

/// Training or sampling produced non-finite values.
class NumericalError : public Error
{
public:
  explicit NumericalError(const std::string & message)
  : Error(ExitCode::kNumerical, "numerical", message)
  {
  }
};

class UsageError : public Error
{
public:
  explicit UsageError(const std::string & message) : Error(ExitCode::kUsage, "usage", message) {}
};

}  // namespace riskenv

#endif  // RISKENV_ERROR_HPP_

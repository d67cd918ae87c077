// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cassert>
#include <utility>
#include <variant>

namespace parp {

// Small value-or-error carrier. E is an error enum; T must not be the same
// type as E.
template <typename T, typename E>
class Result {
  public:
    Result(T value) : data_(std::move(value)) {}
    Result(E error) : data_(error) {}

    bool ok() const { return std::holds_alternative<T>(data_); }
    explicit operator bool() const { return ok(); }

    const T& value() const& {
        assert(ok());
        return std::get<T>(data_);
    }
    T&& value() && {
        assert(ok());
        return std::get<T>(std::move(data_));
    }
    E error() const {
        assert(!ok());
        return std::get<E>(data_);
    }

  private:
    std::variant<T, E> data_;
};

}  // namespace parp

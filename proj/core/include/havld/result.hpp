/**
 * Copyright 2026 The havld Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <optional>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <variant>

namespace havld {

template <class E>
struct Unexpected {
    E error;
};

template <class E>
Unexpected<std::decay_t<E>> unexpected(E&& e)
{
    return {std::forward<E>(e)};
}

class BadResultAccess : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Value-or-error return type for operations whose failures are ordinary data
// (refused admissions, malformed datagrams, config errors).
template <class T, class E>
class Result {
public:
    Result(T value) : v_(std::in_place_index<0>, std::move(value)) {}
    Result(Unexpected<E> err) : v_(std::in_place_index<1>, std::move(err.error)) {}

    bool has_value() const noexcept { return v_.index() == 0; }
    explicit operator bool() const noexcept { return has_value(); }

    T& value() &
    {
        if (!has_value())
            throw BadResultAccess("Result holds an error");
        return std::get<0>(v_);
    }
    const T& value() const&
    {
        if (!has_value())
            throw BadResultAccess("Result holds an error");
        return std::get<0>(v_);
    }
    T&& value() &&
    {
        if (!has_value())
            throw BadResultAccess("Result holds an error");
        return std::get<0>(std::move(v_));
    }

    const E& error() const&
    {
        if (has_value())
            throw BadResultAccess("Result holds a value");
        return std::get<1>(v_);
    }

    T* operator->() { return &value(); }
    const T* operator->() const { return &value(); }
    T& operator*() & { return value(); }
    const T& operator*() const& { return value(); }

private:
    std::variant<T, E> v_;
};

template <class E>
class Result<void, E> {
public:
    Result() = default;
    Result(Unexpected<E> err) : err_(std::move(err.error)) {}

    bool has_value() const noexcept { return !err_.has_value(); }
    explicit operator bool() const noexcept { return has_value(); }

    const E& error() const
    {
        if (has_value())
            throw BadResultAccess("Result holds a value");
        return *err_;
    }

private:
    std::optional<E> err_;
};

} // namespace havld

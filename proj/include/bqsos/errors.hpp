#pragma once

#include <stdexcept>
#include <string>

namespace bqsos {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidIndex : Error { using Error::Error; };
struct InvalidInput : Error { using Error::Error; };
struct InvalidShape : Error { using Error::Error; };
struct NotTripartite : Error { using Error::Error; };
struct InvalidCertificate : Error { using Error::Error; };
struct NotAZero : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct NotPsd : Error { using Error::Error; };
struct NotFromForm211 : Error { using Error::Error; };
struct UnknownFixture : Error { using Error::Error; };

}  // namespace bqsos

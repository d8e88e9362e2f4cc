#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qdx {

// Error taxonomy shared across modules. `kind()` is stable and machine-readable;
// the CLI maps ConfigError -> exit 2, everything else -> exit 3.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define QDX_ERROR_KIND(Name)                                        \
    class Name : public Error {                                     \
    public:                                                         \
        explicit Name(const std::string& msg) : Error(#Name, msg) {} \
    }

QDX_ERROR_KIND(DomainError);
QDX_ERROR_KIND(BandCountMismatch);
QDX_ERROR_KIND(RootCountMismatch);
QDX_ERROR_KIND(DegenerateFit);
QDX_ERROR_KIND(TolUnreachable);
QDX_ERROR_KIND(GridTooCoarse);
QDX_ERROR_KIND(BoxCapExceeded);
QDX_ERROR_KIND(SeriesTooShort);
QDX_ERROR_KIND(ConfigError);
QDX_ERROR_KIND(SchemaError);

#undef QDX_ERROR_KIND

// Fibonacci numbers with the paper's indexing: F_0 = F_1 = 1, F_{k+1} = F_k + F_{k-1}.
inline std::int64_t fibonacci(int k) {
    if (k < 0) throw DomainError("fibonacci index must be >= 0");
    std::int64_t a = 1, b = 1;  // F_0, F_1
    for (int i = 1; i <= k - 1; ++i) {
        std::int64_t c = a + b;
        a = b;
        b = c;
    }
    return k == 0 ? a : b;
}

}  // namespace qdx

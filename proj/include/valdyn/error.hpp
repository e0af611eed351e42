#pragma once

#include <stdexcept>
#include <string>

namespace valdyn {

// Every library failure carries a short machine-readable kind; the CLI
// forwards it verbatim as `error.kind`.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

}  // namespace valdyn

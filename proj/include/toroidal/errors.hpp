#pragma once

#include <stdexcept>
#include <string>

namespace toroidal {

struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct rank_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct invalid_grid : std::invalid_argument {
    invalid_grid() : std::invalid_argument("distinct nonzero points required") {}
    using std::invalid_argument::invalid_argument;
};

struct system_mismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct not_a_root : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct degenerate_spec : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct not_unimodular : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace toroidal

#ifndef EWSMOOTH_VERSION_HPP
#define EWSMOOTH_VERSION_HPP

namespace ewsmooth {

inline constexpr const char* library_version = "0.1.0";

/// Schema tag stamped into every CSV header row.
inline constexpr const char* csv_schema_version = "1";

} // namespace ewsmooth

#endif

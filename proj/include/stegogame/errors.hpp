#pragma once

#include <stdexcept>
#include <string>

namespace stegogame {

// Base of every error raised by the library. The CLI maps these to exit code 2.
class StegoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define STEGOGAME_ERROR(Name)                       \
  class Name : public StegoError {                  \
   public:                                          \
    explicit Name(const std::string& what)          \
        : StegoError(std::string(#Name ": ") + what) {} \
  }

STEGOGAME_ERROR(LengthMismatch);
STEGOGAME_ERROR(ParseError);
STEGOGAME_ERROR(FormatError);
STEGOGAME_ERROR(InvalidParameter);
STEGOGAME_ERROR(DomainError);
STEGOGAME_ERROR(TooLarge);
STEGOGAME_ERROR(SeedTooShort);
STEGOGAME_ERROR(UnsupportedLength);
STEGOGAME_ERROR(MessageLengthMismatch);
STEGOGAME_ERROR(KeyError);
STEGOGAME_ERROR(SupportError);
STEGOGAME_ERROR(BoundViolation);
STEGOGAME_ERROR(ConfigError);
STEGOGAME_ERROR(NondeterministicDistinguisher);

#undef STEGOGAME_ERROR

}  // namespace stegogame

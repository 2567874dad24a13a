#ifndef BBOXLAB_ERROR_H_
#define BBOXLAB_ERROR_H_

#include <stdexcept>
#include <string>

namespace bboxlab {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A box with non-positive width/height or inverted corners.
class InvalidBox : public Error {
 public:
  using Error::Error;
};

// A metric parameter out of its domain (negative scale, S <= 0, ...).
class InvalidParam : public Error {
 public:
  using Error::Error;
};

// A metric needs a dataset constant (S or C) that was not supplied.
class MissingParam : public Error {
 public:
  using Error::Error;
};

// Finite-difference check requested at a kink of the loss.
class NonGenericPoint : public Error {
 public:
  using Error::Error;
};

// Monte-Carlo estimate whose denominator count is zero.
class DegenerateSample : public Error {
 public:
  using Error::Error;
};

// Malformed annotation input; the message carries a file/line/record locator.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed annotation with an invalid box.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Statistics requested on a dataset without boxes.
class EmptyDataset : public Error {
 public:
  using Error::Error;
};

}  // namespace bboxlab

#endif  // BBOXLAB_ERROR_H_

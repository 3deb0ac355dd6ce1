#pragma once

#include <stdexcept>
#include <string>

namespace mura {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// The 2x2 linear part of an affine geotransform is not invertible.
class SingularTransform : public Error {
public:
  using Error::Error;
};

/// Two rasters (or a raster and an AOI) do not share a coordinate reference system.
class CrsMismatch : public Error {
public:
  using Error::Error;
};

/// The requested region does not intersect the raster footprint.
class NoOverlap : public Error {
public:
  using Error::Error;
};

/// A finer-than-source output grid was requested from the downsampler.
class UpsampleRequested : public Error {
public:
  using Error::Error;
};

/// A text or JSON input failed to parse. `where` is a 1-based line number
/// (tiepoint files) or record index (manifests).
class ParseError : public Error {
public:
  explicit ParseError(const std::string& msg) : Error(msg), where_(-1) {}
  ParseError(const std::string& msg, long where)
      : Error(msg + " (at line/record " + std::to_string(where) + ")"), where_(where) {}
  long where() const { return where_; }

private:
  long where_ = -1;
};

/// A coordinate lies outside its declared grid.
class OutOfGrid : public Error {
public:
  using Error::Error;
};

/// Fewer tiepoints than model parameters.
class InsufficientPoints : public Error {
public:
  using Error::Error;
};

/// Design matrix numerically rank deficient.
class RankDeficient : public Error {
public:
  using Error::Error;
};

/// An operation that needs at least one element got none.
class EmptySet : public Error {
public:
  using Error::Error;
};

/// RANSAC found no consensus set above the acceptance floor.
class NoConsensus : public Error {
public:
  using Error::Error;
};

/// No tile footprint intersects the AOI.
class NoTile : public Error {
public:
  using Error::Error;
};

/// A pairwise alignment job could not produce a model.
class FailedAlignment : public Error {
public:
  using Error::Error;
};

/// File could not be read, written, or recognized.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace mura

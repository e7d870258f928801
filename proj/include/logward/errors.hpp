#pragma once

#include <stdexcept>
#include <string>

namespace logward {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// corpus
class MalformedLine : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };
class FormatError : public Error { public: using Error::Error; };
class InfeasibleSplit : public Error { public: using Error::Error; };

// embedder / remote endpoints
class RemoteUnavailable : public Error { public: using Error::Error; };
class DimensionMismatch : public Error { public: using Error::Error; };

// clustering
class TooFewPoints : public Error { public: using Error::Error; };
class SingleCluster : public Error { public: using Error::Error; };

// annotator
class EmptyPool : public Error { public: using Error::Error; };
class UnparseableResponse : public Error { public: using Error::Error; };

// propagation
class MissingClusterLabel : public Error { public: using Error::Error; };
class EmptyValidation : public Error { public: using Error::Error; };

// detector
class EmptyVocabulary : public Error { public: using Error::Error; };
class SingleClassData : public Error { public: using Error::Error; };
class LengthMismatch : public Error { public: using Error::Error; };

// pipeline
class MissingTruth : public Error { public: using Error::Error; };

} // namespace logward

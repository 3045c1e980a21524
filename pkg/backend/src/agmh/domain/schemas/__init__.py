# Package marker for agmh.domain.schemas

# Package marker for agmh.infrastructure.storage

# Package file

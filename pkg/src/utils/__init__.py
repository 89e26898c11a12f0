﻿# Package file

# Planar Microcoil Field & Drive Toolkit

# 空初始化文件，标记为 Python 测试包

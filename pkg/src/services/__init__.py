"""
服務層模組

建構與檢查：
- builtin_categories / fincat_service / universal: 有限範疇與原正合結構
- diagram_service / groupoids: 圖表同構族與胞腔廣群的等價判定
- seq_service / s_construction / iterated: Seq、S 與迭代 S 建構
- simplicial_checks: 單純恆等式、Segal、2-Segal、邊細分
- sigma_service / sigma_checks / negative_control: Σ-集合與負控制
- ktheory: K_0 與 Smith 標準形
- job_runner: CLI 的工作執行與報告
"""
